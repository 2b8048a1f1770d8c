#include "physedit/card.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace physedit {
namespace {

bool is_word_char(unsigned char c) {
    // Alphanumerics plus apostrophes form words; any UTF-8 continuation or
    // lead byte (>= 0x80) is kept so multibyte words survive intact.
    return std::isalnum(c) != 0 || c == '\'' || c >= 0x80;
}

std::string ascii_lower(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (is_word_char(c)) {
            current.push_back(
                static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

int round_half_away(double x) {
    return static_cast<int>(std::llround(x));
}

}  // namespace

const char* level_name(ComplexityLevel level) {
    switch (level) {
        case ComplexityLevel::Low: return "low";
        case ComplexityLevel::Medium: return "medium";
        case ComplexityLevel::High: return "high";
    }
    throw InputError("invalid complexity level value");
}

ComplexityLevel parse_level(const std::string& name) {
    if (name == "low") return ComplexityLevel::Low;
    if (name == "medium") return ComplexityLevel::Medium;
    if (name == "high") return ComplexityLevel::High;
    throw ParseError("unknown complexity level '" + name +
                     "' (expected low, medium, or high)");
}

ComplexityDistribution ComplexityDistribution::one_hot(ComplexityLevel level) {
    ComplexityDistribution dist{0.0, 0.0, 0.0};
    switch (level) {
        case ComplexityLevel::Low: dist.p_low = 1.0; break;
        case ComplexityLevel::Medium: dist.p_medium = 1.0; break;
        case ComplexityLevel::High: dist.p_high = 1.0; break;
    }
    return dist;
}

void ComplexityDistribution::validate() const {
    for (double p : {p_low, p_medium, p_high}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw InputError(
                "complexity probabilities must lie in [0, 1], got " +
                std::to_string(p));
        }
    }
    const double sum = p_low + p_medium + p_high;
    if (std::abs(sum - 1.0) > 1e-9) {
        throw InputError("complexity probabilities must sum to 1, got " +
                         std::to_string(sum));
    }
}

ComplexityLevel ComplexityDistribution::top_level() const {
    if (p_high >= p_medium && p_high >= p_low) return ComplexityLevel::High;
    if (p_medium >= p_low) return ComplexityLevel::Medium;
    return ComplexityLevel::Low;
}

void ComplexityLevels::validate() const {
    for (const LevelAllocation& a : {low, medium, high}) {
        if (a.reasoning_steps <= 0 || a.reasoning_frames <= 0) {
            throw InputError("complexity level allocations must be positive");
        }
    }
}

Lexicon Lexicon::builtin() {
    Lexicon lex;
    const std::initializer_list<const char*> high = {
        "pick", "picks", "picking", "picked",
        "lift", "lifts", "lifting", "lifted",
        "push", "pushes", "pushing", "pushed",
        "pull", "pulls", "pulling", "pulled",
        "throw", "throws", "throwing", "threw", "thrown",
        "walk", "walks", "walking", "walked",
        "run", "runs", "running", "ran",
        "jump", "jumps", "jumping", "jumped",
        "raise", "raises", "raising", "raised",
        "grab", "grabs", "grabbing", "grabbed",
        "rotate", "rotates", "rotating", "rotated",
        "pose", "poses", "posing", "posed",
        "salute", "salutes", "saluting", "saluted",
        "kick", "kicks", "kicking", "kicked",
        "wave", "waves", "waving", "waved",
    };
    const std::initializer_list<const char*> medium = {
        "add", "adds", "adding", "added",
        "remove", "removes", "removing", "removed",
        "replace", "replaces", "replacing", "replaced",
        "insert", "inserts", "inserting", "inserted",
        "delete", "deletes", "deleting", "deleted",
        "erase", "erases", "erasing", "erased",
        "swap", "swaps", "swapping", "swapped",
        "background",
    };
    const std::initializer_list<const char*> low = {
        "color", "colors", "colored", "colour", "colours", "coloured",
        "recolor", "recolour",
        "red", "blue", "green", "yellow", "purple", "orange", "pink",
        "black", "white", "golden",
        "style", "styles", "styled",
        "watercolor", "watercolour", "sketch", "cartoon", "vintage",
        "sepia", "grayscale",
        "filter", "filters", "filtered",
        "brighten", "brightens", "brightened",
        "darken", "darkens", "darkened",
        "tint", "tints", "tinted",
    };
    for (const char* w : high) lex.insert(ComplexityLevel::High, w);
    for (const char* w : medium) lex.insert(ComplexityLevel::Medium, w);
    for (const char* w : low) lex.insert(ComplexityLevel::Low, w);
    return lex;
}

Lexicon Lexicon::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open lexicon file '" + path + "'");
    }
    Lexicon lex;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string entry = trim(line);
        if (entry.empty()) continue;
        const std::size_t tab = entry.find('\t');
        if (tab == std::string::npos) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected class<TAB>keyword");
        }
        const std::string cls = trim(entry.substr(0, tab));
        const std::string keyword = ascii_lower(trim(entry.substr(tab + 1)));
        if (keyword.empty()) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": empty keyword");
        }
        ComplexityLevel level;
        try {
            level = parse_level(cls);
        } catch (const ParseError&) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": unknown class '" + cls + "'");
        }
        try {
            lex.insert(level, keyword);
        } catch (const InputError& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    lex.validate();
    return lex;
}

void Lexicon::insert(ComplexityLevel level, const std::string& keyword) {
    const std::string word = ascii_lower(keyword);
    for (ComplexityLevel other : {ComplexityLevel::Low, ComplexityLevel::Medium,
                                  ComplexityLevel::High}) {
        if (other != level && contains(other, word)) {
            throw InputError("keyword '" + word + "' already belongs to class " +
                             level_name(other));
        }
    }
    switch (level) {
        case ComplexityLevel::Low: low_.insert(word); break;
        case ComplexityLevel::Medium: medium_.insert(word); break;
        case ComplexityLevel::High: high_.insert(word); break;
    }
}

bool Lexicon::contains(ComplexityLevel level, const std::string& keyword) const {
    return keywords(level).count(keyword) != 0;
}

const std::set<std::string>& Lexicon::keywords(ComplexityLevel level) const {
    switch (level) {
        case ComplexityLevel::Low: return low_;
        case ComplexityLevel::Medium: return medium_;
        case ComplexityLevel::High: return high_;
    }
    throw InputError("invalid complexity level value");
}

void Lexicon::validate() const {
    if (low_.empty() || medium_.empty() || high_.empty()) {
        throw InputError("lexicon must define keywords for all three classes");
    }
}

ComplexityDistribution classify_instruction(const std::string& instruction,
                                            const Lexicon& lexicon) {
    const std::vector<std::string> tokens = tokenize(instruction);
    if (tokens.empty()) {
        throw InputError("instruction is empty");
    }
    bool saw_medium = false;
    bool saw_low = false;
    for (const std::string& token : tokens) {
        if (lexicon.contains(ComplexityLevel::High, token)) {
            return ComplexityDistribution::one_hot(ComplexityLevel::High);
        }
        saw_medium = saw_medium || lexicon.contains(ComplexityLevel::Medium, token);
        saw_low = saw_low || lexicon.contains(ComplexityLevel::Low, token);
    }
    if (saw_medium) return ComplexityDistribution::one_hot(ComplexityLevel::Medium);
    if (saw_low) return ComplexityDistribution::one_hot(ComplexityLevel::Low);
    return ComplexityDistribution::one_hot(ComplexityLevel::Medium);
}

Allocation allocate(const ComplexityDistribution& dist,
                    const ComplexityLevels& levels) {
    dist.validate();
    levels.validate();
    const double steps = dist.p_low * levels.low.reasoning_steps +
                         dist.p_medium * levels.medium.reasoning_steps +
                         dist.p_high * levels.high.reasoning_steps;
    const double frames = dist.p_low * levels.low.reasoning_frames +
                          dist.p_medium * levels.medium.reasoning_frames +
                          dist.p_high * levels.high.reasoning_frames;
    return Allocation{round_half_away(steps), round_half_away(frames)};
}

KeywordPredictor::KeywordPredictor(Lexicon lexicon)
    : lexicon_(std::move(lexicon)) {
    lexicon_.validate();
}

ComplexityDistribution KeywordPredictor::predict(
    const std::string& instruction) const {
    return classify_instruction(instruction, lexicon_);
}

}  // namespace physedit
