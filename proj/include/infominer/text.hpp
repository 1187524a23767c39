// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace infominer {

bool is_valid_utf8(std::string_view s);

/// Decodes the code point starting at `pos` and advances `pos`. Invalid
/// bytes decode as U+FFFD and advance by one.
char32_t next_code_point(std::string_view s, std::size_t& pos);

/// White_Space property code points.
bool is_unicode_space(char32_t cp);

/// Strips leading and trailing Unicode whitespace.
std::string_view trim(std::string_view s);

/// Splits on runs of Unicode whitespace; never yields empty pieces.
std::vector<std::string_view> split_whitespace(std::string_view s);

}  // namespace infominer
