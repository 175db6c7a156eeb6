#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace leakfix::ir {

/// Maximal runs of non-whitespace characters, in order. Whitespace inside a
/// double-quoted literal does not split.
std::vector<std::string> tokenize_ir(std::string_view text);

/// Unit-cost token Levenshtein distance (insert, delete, substitute).
std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// edit_distance(hyp, ref) / |ref|. Throws std::invalid_argument on an
/// empty reference.
double normalized_edit_distance(const std::vector<std::string>& hyp, const std::vector<std::string>& ref);

}  // namespace leakfix::ir
