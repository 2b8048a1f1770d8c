#pragma once

#include <set>
#include <string>

#include "physedit/errors.hpp"

namespace physedit {

enum class ComplexityLevel { Low, Medium, High };

/// "low" / "medium" / "high".
const char* level_name(ComplexityLevel level);
/// Inverse of level_name; throws ParseError for anything else.
ComplexityLevel parse_level(const std::string& name);

/// Probability triple over the complexity levels.
struct ComplexityDistribution {
    double p_low = 0.0;
    double p_medium = 1.0;
    double p_high = 0.0;

    static ComplexityDistribution one_hot(ComplexityLevel level);
    /// Throws InputError unless each weight lies in [0,1] and they sum to 1
    /// within 1e-9.
    void validate() const;
    /// Most probable level; ties break toward the higher level.
    ComplexityLevel top_level() const;
};

/// (reasoning steps N_r, reasoning frames r) pair for one complexity level.
struct LevelAllocation {
    int reasoning_steps = 0;
    int reasoning_frames = 0;
};

/// Per-level allocation table. Defaults are the shipped operating points:
/// low (3, 2), medium (8, 4), high (15, 8).
struct ComplexityLevels {
    LevelAllocation low{3, 2};
    LevelAllocation medium{8, 4};
    LevelAllocation high{15, 8};

    void validate() const;
};

struct Allocation {
    int reasoning_steps = 0;   // N_r*
    int reasoning_frames = 0;  // r*
};

/// Three pairwise-disjoint keyword sets, matched case-insensitively against
/// whole words of the instruction.
class Lexicon {
  public:
    /// The compiled-in default keyword sets (mirrored by data/lexicon.tsv).
    static Lexicon builtin();
    /// Loads `class<TAB>keyword` lines; '#' starts a comment, blank lines are
    /// skipped. Throws ParseError (with line number) on malformed lines,
    /// unknown classes, or keywords appearing in more than one class; IoError
    /// if the file cannot be read.
    static Lexicon from_file(const std::string& path);

    /// Inserts a (lowercased) keyword; throws InputError if the word already
    /// belongs to a different class.
    void insert(ComplexityLevel level, const std::string& keyword);
    bool contains(ComplexityLevel level, const std::string& keyword) const;
    const std::set<std::string>& keywords(ComplexityLevel level) const;
    /// Throws InputError unless all three sets are non-empty.
    void validate() const;

    bool operator==(const Lexicon& other) const = default;

  private:
    std::set<std::string> low_;
    std::set<std::string> medium_;
    std::set<std::string> high_;
};

/// Deterministic keyword rule: one-hot on the highest-priority matched class
/// (high > medium > low); instructions matching no keyword → one-hot medium.
/// Throws InputError if the instruction contains no words at all.
ComplexityDistribution classify_instruction(const std::string& instruction,
                                            const Lexicon& lexicon);

/// Soft interpolation across the level table: each count is the
/// probability-weighted mean of the per-level values, rounded half away from
/// zero.
Allocation allocate(const ComplexityDistribution& dist,
                    const ComplexityLevels& levels);

/// Pluggable instruction-complexity predictor; the keyword rule is the
/// default implementation, a learned predictor can slot in unchanged.
class ComplexityPredictor {
  public:
    virtual ~ComplexityPredictor() = default;
    virtual ComplexityDistribution predict(const std::string& instruction) const = 0;
};

class KeywordPredictor final : public ComplexityPredictor {
  public:
    explicit KeywordPredictor(Lexicon lexicon);
    ComplexityDistribution predict(const std::string& instruction) const override;
    const Lexicon& lexicon() const { return lexicon_; }

  private:
    Lexicon lexicon_;
};

}  // namespace physedit
