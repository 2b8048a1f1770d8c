#pragma once

#include <stdexcept>

namespace physedit {

// Error categories used across the library. Everything derives from Error so
// callers that do not care about the category can catch a single type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error { using Error::Error; };      // invalid parameter or option value
struct DimensionError : Error { using Error::Error; };   // grid / stack shape mismatch
struct InputError : Error { using Error::Error; };       // malformed caller input
struct CapabilityError : Error { using Error::Error; };  // backbone lacks a required feature
struct IndexError : Error { using Error::Error; };       // step or frame index out of range
struct ScheduleError : Error { using Error::Error; };    // non-monotone time stepping
struct ParseError : Error { using Error::Error; };       // config / lexicon file syntax
struct IoError : Error { using Error::Error; };

}  // namespace physedit
