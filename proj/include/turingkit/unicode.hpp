// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace turingkit::unicode {

/// Decodes UTF-8; each invalid byte becomes U+FFFD.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view codepoints);
void append_utf8(std::string& out, char32_t cp);

/// Letters, marks, digits (general categories L*, M*, N*) and underscore.
bool is_word_char(char32_t cp);
/// General category Lu.
bool is_uppercase(char32_t cp);
/// General category P* plus every ASCII punctuation character.
bool is_punctuation(char32_t cp);
bool is_whitespace(char32_t cp);
/// Unicode Extended_Pictographic property.
bool is_extended_pictographic(char32_t cp);
/// Emoji presentation helpers that never form words: ZWJ, variation
/// selectors, skin-tone modifiers, regional indicators, keycap combiner, tags.
bool is_emoji_component(char32_t cp);

/// Simple (single-codepoint) lowercase mapping.
char32_t to_lower(char32_t cp);
std::u32string to_lower(std::u32string_view text);

}  // namespace turingkit::unicode
