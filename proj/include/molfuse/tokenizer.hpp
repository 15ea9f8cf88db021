//
// Project molfuse - Copyright 2026 The molfuse Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "molfuse/common.hpp"
#include "molfuse/io.hpp"

namespace molfuse {

// Subword vocabulary learned by byte-pair encoding over a SMILES corpus.
// Ids 0..2 are the special tokens; base units and merged subwords follow in
// creation order.
struct Vocab {
  static constexpr const char *kPad = "[PAD]";
  static constexpr const char *kCls = "[CLS]";
  static constexpr const char *kSep = "[SEP]";
  static constexpr int kPadId = 0;
  static constexpr int kClsId = 1;
  static constexpr int kSepId = 2;
  static constexpr int kNumSpecials = 3;

  std::vector<std::string> id_to_subword;
  std::unordered_map<std::string, int> subword_to_id;
  std::vector<std::pair<std::string, std::string>> merges;

  int size() const { return static_cast<int>(id_to_subword.size()); }

  int id_of(const std::string &subword) const {
    auto it = subword_to_id.find(subword);
    return it == subword_to_id.end() ? -1 : it->second;
  }

  const std::string &subword(int id) const {
    if (id < 0 || id >= size()) {
      raise(Errc::kInvalidId, "token id " + std::to_string(id) +
                                  " outside vocabulary of size " +
                                  std::to_string(size()));
    }
    return id_to_subword[static_cast<size_t>(id)];
  }

  void add(const std::string &subword) {
    subword_to_id.emplace(subword, size());
    id_to_subword.push_back(subword);
  }
};

namespace detail {

// SMILES-aware pre-split: bracket atoms stay atomic, Cl/Br stay two-letter
// units, everything else is a single character. BPE merges therefore never
// cross a bracket boundary.
inline std::vector<std::string> base_units(std::string_view s) {
  std::vector<std::string> units;
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '[') {
      size_t j = i + 1;
      while (j < s.size() && s[j] != ']') ++j;
      if (j == s.size()) {
        raise(Errc::kUnknownCharacter, "unterminated bracket atom",
              std::string(s));
      }
      units.emplace_back(s.substr(i, j - i + 1));
      i = j + 1;
    } else if (i + 1 < s.size() &&
               ((s[i] == 'C' && s[i + 1] == 'l') ||
                (s[i] == 'B' && s[i + 1] == 'r'))) {
      units.emplace_back(s.substr(i, 2));
      i += 2;
    } else {
      units.emplace_back(1, s[i]);
      ++i;
    }
  }
  return units;
}

inline void apply_merge(std::vector<std::string> &units, const std::string &a,
                        const std::string &b) {
  size_t w = 0;
  for (size_t r = 0; r < units.size();) {
    if (r + 1 < units.size() && units[r] == a && units[r + 1] == b) {
      units[w++] = a + b;
      r += 2;
    } else {
      if (w != r) units[w] = std::move(units[r]);
      ++w;
      ++r;
    }
  }
  units.resize(w);
}

} // namespace detail

// Trains a BPE vocabulary: starts from the corpus base alphabet plus the
// three special tokens and appends the most frequent adjacent pair until
// the budget is reached. Ties break lexicographically on the pair.
inline Vocab train_bpe(std::span<const std::string> corpus, int budget) {
  std::vector<std::vector<std::string>> lines;
  std::map<std::string, int> alphabet;
  for (const auto &s : corpus) {
    if (s.empty()) continue;
    auto units = detail::base_units(s);
    for (const auto &u : units) alphabet[u] += 1;
    lines.push_back(std::move(units));
  }
  if (lines.empty()) raise(Errc::kEmptyCorpus, "no non-empty corpus lines");

  Vocab v;
  v.add(Vocab::kPad);
  v.add(Vocab::kCls);
  v.add(Vocab::kSep);
  for (const auto &[unit, count] : alphabet) {
    (void)count;
    v.add(unit);
  }
  if (budget < v.size()) {
    raise(Errc::kBudgetTooSmall,
          "budget " + std::to_string(budget) + " below base vocabulary of " +
              std::to_string(v.size()));
  }

  while (v.size() < budget) {
    std::map<std::pair<std::string, std::string>, long> pair_count;
    for (const auto &units : lines) {
      for (size_t i = 0; i + 1 < units.size(); ++i) {
        pair_count[{units[i], units[i + 1]}] += 1;
      }
    }
    if (pair_count.empty()) break;
    auto best = pair_count.begin();
    for (auto it = pair_count.begin(); it != pair_count.end(); ++it) {
      if (it->second > best->second) best = it; // map order breaks ties
    }
    const auto [a, b] = best->first;
    v.merges.emplace_back(a, b);
    v.add(a + b);
    for (auto &units : lines) detail::apply_merge(units, a, b);
  }
  return v;
}

// Greedy BPE encoding: pre-split into base units, then apply every merge
// rule in creation order. The concatenation of the output subwords always
// equals the input string.
inline std::vector<int> tokenize(std::string_view s, const Vocab &v) {
  auto units = detail::base_units(s);
  for (const auto &u : units) {
    if (v.id_of(u) < 0) {
      raise(Errc::kUnknownCharacter, "unit '" + u + "' outside the base set",
            std::string(s));
    }
  }
  for (const auto &[a, b] : v.merges) detail::apply_merge(units, a, b);
  std::vector<int> ids;
  ids.reserve(units.size());
  for (const auto &u : units) ids.push_back(v.id_of(u));
  return ids;
}

// Exact inverse of tokenize; special tokens are stripped.
inline std::string detokenize(std::span<const int> ids, const Vocab &v) {
  std::string out;
  for (int id : ids) {
    if (id == Vocab::kPadId || id == Vocab::kClsId || id == Vocab::kSepId) {
      continue;
    }
    out += v.subword(id);
  }
  return out;
}

// Vocabulary file: "subword<TAB>id" lines in id order, then one
// "#merge a b" line per merge rule in creation order.
inline std::string vocab_to_string(const Vocab &v) {
  std::ostringstream out;
  for (int i = 0; i < v.size(); ++i) {
    out << v.id_to_subword[static_cast<size_t>(i)] << '\t' << i << '\n';
  }
  for (const auto &[a, b] : v.merges) out << "#merge " << a << ' ' << b << '\n';
  return out.str();
}

inline void save_vocab(const Vocab &v, const std::string &path) {
  atomic_write(path, vocab_to_string(v));
}

inline Vocab vocab_from_string(const std::string &text) {
  Vocab v;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind("#merge ", 0) == 0) {
      auto parts = split(line.substr(7), ' ');
      if (parts.size() != 2) {
        raise(Errc::kParseError, "bad merge rule at line " + std::to_string(lineno));
      }
      v.merges.emplace_back(parts[0], parts[1]);
      continue;
    }
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      raise(Errc::kParseError, "missing tab at line " + std::to_string(lineno));
    }
    const std::string subword = line.substr(0, tab);
    const int id = std::stoi(line.substr(tab + 1));
    if (id != v.size()) {
      raise(Errc::kParseError, "non-contiguous id at line " + std::to_string(lineno));
    }
    v.add(subword);
  }
  if (v.size() < Vocab::kNumSpecials || v.id_to_subword[0] != Vocab::kPad ||
      v.id_to_subword[1] != Vocab::kCls || v.id_to_subword[2] != Vocab::kSep) {
    raise(Errc::kParseError, "vocabulary lacks the special token header");
  }
  return v;
}

inline Vocab load_vocab(const std::string &path) {
  return vocab_from_string(read_file(path));
}

} // namespace molfuse
