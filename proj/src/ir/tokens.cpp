#include "leakfix/ir/tokens.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace leakfix::ir {

std::vector<std::string> tokenize_ir(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        bool in_string = false;
        while (i < text.size() && (in_string || !std::isspace(static_cast<unsigned char>(text[i])))) {
            if (in_string && text[i] == '\\' && i + 1 < text.size()) {
                i += 2;
                continue;
            }
            if (text[i] == '"') in_string = !in_string;
            ++i;
        }
        if (i > start) out.emplace_back(text.substr(start, i - start));
    }
    return out;
}

std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t up = row[j];
            std::size_t subst = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[j] = std::min({up + 1, row[j - 1] + 1, subst});
            diag = up;
        }
    }
    return row[b.size()];
}

double normalized_edit_distance(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
    if (ref.empty()) throw std::invalid_argument("normalized edit distance needs a nonempty reference");
    return static_cast<double>(edit_distance(hyp, ref)) / static_cast<double>(ref.size());
}

}  // namespace leakfix::ir
