//
// Project molfuse - Copyright 2026 The molfuse Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cstdio>
int main() { std::puts("acceptance placeholder"); return 1; }
