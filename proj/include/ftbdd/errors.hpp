#pragma once

#include <stdexcept>
#include <string>

namespace ftbdd {

/// An analysis that was set up correctly but could not produce a result.
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configured resource cap (solutions, states, panels) was hit.
class LimitExceeded : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

/// Importance measure whose denominator vanishes.
class UndefinedMeasure : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

}  // namespace ftbdd
