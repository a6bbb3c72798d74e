#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cuecraft {

/// Maps inflected verb forms to their lemma. Each line holds a lemma followed by
/// its forms; lines starting with '#' are comments.
class VerbLexicon {
public:
    VerbLexicon() = default;
    static VerbLexicon parse(std::string_view text);
    static VerbLexicon load(const std::filesystem::path& path);

    /// Lemma for a lowercased token, trying the table first and then regular
    /// suffix folding (-s, -es, -ies, -ed, -ing, doubled consonants, dropped e).
    std::optional<std::string> lemma_of(std::string_view token) const;
    std::size_t lemma_count() const noexcept { return lemmas_; }

private:
    std::unordered_map<std::string, std::string> forms_;
    std::size_t lemmas_ = 0;
};

/// The lexicon shipped under the data directory, loaded once.
const VerbLexicon& default_verb_lexicon();

/// 100 * distinct verb lemmas / verb tokens; 100 for text without verbs.
double diverse_verbs(std::string_view text, const VerbLexicon& lexicon);
double diverse_verbs(std::string_view text);

struct PrfScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Lowercases, deletes ASCII punctuation and splits on whitespace.
std::vector<std::string> rouge_tokens(std::string_view text);

/// Clipped unigram overlap.
PrfScore rouge_1(std::string_view candidate, std::string_view reference);
/// Longest common subsequence over tokens.
PrfScore rouge_l(std::string_view candidate, std::string_view reference);

/// Throws LengthMismatch for unequal or empty inputs.
double cohens_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Pearson correlation of average ranks. Throws LengthMismatch, or
/// DegenerateInput for fewer than two points or a constant side.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Coefficient of determination of the least-squares line of y on x. Constant x
/// throws DegenerateInput; constant y is a perfect fit (1.0).
double r_squared(const std::vector<double>& x, const std::vector<double>& y);

} // namespace cuecraft
