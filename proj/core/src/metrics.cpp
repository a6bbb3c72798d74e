#include "cuecraft/metrics.hpp"

#include "cuecraft/errors.hpp"
#include "cuecraft/templates.hpp"
#include "cuecraft/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace cuecraft {
namespace {

PrfScore prf(double overlap, std::size_t cand, std::size_t ref) {
    PrfScore s;
    s.precision = cand == 0 ? 0.0 : overlap / static_cast<double>(cand);
    s.recall = ref == 0 ? 0.0 : overlap / static_cast<double>(ref);
    s.f1 = s.precision + s.recall == 0.0 ? 0.0 : 2 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
            ++j;
        }
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = r;
        }
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) {
        throw DegenerateInput("correlation is undefined for a constant series");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b) {
        throw LengthMismatch("series lengths differ (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

} // namespace

VerbLexicon VerbLexicon::parse(std::string_view text) {
    VerbLexicon lex;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream words(line);
        std::string lemma;
        words >> lemma;
        lemma = to_lower(lemma);
        ++lex.lemmas_;
        lex.forms_.emplace(lemma, lemma);
        for (std::string form; words >> form;) {
            lex.forms_.emplace(to_lower(form), lemma);
        }
    }
    return lex;
}

VerbLexicon VerbLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open verb lexicon " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::optional<std::string> VerbLexicon::lemma_of(std::string_view token) const {
    const std::string t(token);
    if (auto it = forms_.find(t); it != forms_.end()) {
        return it->second;
    }
    auto known = [&](const std::string& cand) -> std::optional<std::string> {
        auto it = forms_.find(cand);
        if (it != forms_.end() && it->second == cand) {
            return cand;
        }
        return std::nullopt;
    };
    auto ends = [&](std::string_view suffix) {
        return t.size() > suffix.size() + 1 && t.compare(t.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    auto stem_variants = [&](std::string stem) -> std::optional<std::string> {
        if (auto l = known(stem)) {
            return l;
        }
        if (auto l = known(stem + "e")) {
            return l;
        }
        if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2]) {
            return known(stem.substr(0, stem.size() - 1));
        }
        return std::nullopt;
    };
    if (ends("ies")) {
        return known(t.substr(0, t.size() - 3) + "y");
    }
    if (ends("ied")) {
        return known(t.substr(0, t.size() - 3) + "y");
    }
    if (ends("ing")) {
        return stem_variants(t.substr(0, t.size() - 3));
    }
    if (ends("ed")) {
        return stem_variants(t.substr(0, t.size() - 2));
    }
    if (ends("es")) {
        if (auto l = known(t.substr(0, t.size() - 2))) {
            return l;
        }
    }
    if (ends("s")) {
        return known(t.substr(0, t.size() - 1));
    }
    return std::nullopt;
}

const VerbLexicon& default_verb_lexicon() {
    static const VerbLexicon lexicon = VerbLexicon::load(default_data_dir() / "lexicon" / "verbs.txt");
    return lexicon;
}

double diverse_verbs(std::string_view text, const VerbLexicon& lexicon) {
    std::set<std::string> distinct;
    std::size_t tokens = 0;
    for (const auto& w : tokenize_words(text)) {
        if (auto lemma = lexicon.lemma_of(w)) {
            ++tokens;
            distinct.insert(*lemma);
        }
    }
    if (tokens == 0) {
        return 100.0;
    }
    return 100.0 * static_cast<double>(distinct.size()) / static_cast<double>(tokens);
}

double diverse_verbs(std::string_view text) { return diverse_verbs(text, default_verb_lexicon()); }

std::vector<std::string> rouge_tokens(std::string_view text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (c < 0x80 && std::ispunct(c)) {
            continue;
        }
        cleaned.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
    std::vector<std::string> out;
    std::istringstream in(cleaned);
    for (std::string w; in >> w;) {
        out.push_back(std::move(w));
    }
    return out;
}

PrfScore rouge_1(std::string_view candidate, std::string_view reference) {
    const auto cand = rouge_tokens(candidate);
    const auto ref = rouge_tokens(reference);
    std::map<std::string, std::size_t> ref_counts;
    for (const auto& w : ref) {
        ++ref_counts[w];
    }
    std::map<std::string, std::size_t> cand_counts;
    for (const auto& w : cand) {
        ++cand_counts[w];
    }
    std::size_t overlap = 0;
    for (const auto& [w, n] : cand_counts) {
        if (auto it = ref_counts.find(w); it != ref_counts.end()) {
            overlap += std::min(n, it->second);
        }
    }
    return prf(static_cast<double>(overlap), cand.size(), ref.size());
}

PrfScore rouge_l(std::string_view candidate, std::string_view reference) {
    const auto a = rouge_tokens(candidate);
    const auto b = rouge_tokens(reference);
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prf(static_cast<double>(prev[b.size()]), a.size(), b.size());
}

double cohens_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    check_lengths(a.size(), b.size());
    if (a.empty()) {
        throw LengthMismatch("kappa needs at least one paired label");
    }
    const double n = static_cast<double>(a.size());
    std::map<std::string, double> ca, cb;
    double agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ca[a[i]] += 1;
        cb[b[i]] += 1;
        agree += a[i] == b[i] ? 1 : 0;
    }
    const double po = agree / n;
    double pe = 0;
    for (const auto& [label, count] : ca) {
        if (auto it = cb.find(label); it != cb.end()) {
            pe += (count / n) * (it->second / n);
        }
    }
    if (pe == 1.0) {
        return po == 1.0 ? 1.0 : 0.0;
    }
    return (po - pe) / (1.0 - pe);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    check_lengths(x.size(), y.size());
    if (x.size() < 2) {
        throw DegenerateInput("spearman needs at least two points");
    }
    return pearson(average_ranks(x), average_ranks(y));
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
    check_lengths(x.size(), y.size());
    if (x.size() < 2) {
        throw DegenerateInput("a linear fit needs at least two points");
    }
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) {
        throw DegenerateInput("x is constant; the fit is undefined");
    }
    if (syy == 0) {
        return 1.0;
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (slope * x[i] + intercept);
        ss_res += r * r;
    }
    return std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
}

} // namespace cuecraft
