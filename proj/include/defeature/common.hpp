#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace defeature {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Geometry kernel failures.
struct InvalidPolygon : Error { using Error::Error; };
struct FeatureOutsideDomain : Error { using Error::Error; };
struct BooleanOpFailure : Error { using Error::Error; };
struct UnclassifiableArc : Error { using Error::Error; };
struct ExtensionViolation : Error { using Error::Error; };
struct AlreadyInserted : Error { using Error::Error; };

// Meshing failures.
struct SmallAngleInput : Error { using Error::Error; };
struct NonconvergentRefinement : Error { using Error::Error; };
struct UnknownLabel : Error { using Error::Error; };
struct UnsupportedOrder : Error { using Error::Error; };

// Solver failures.
struct SingularSystem : Error { using Error::Error; };
struct IncompatibleData : Error { using Error::Error; };
struct SolverDivergence : Error { using Error::Error; };
struct PointOutsideDomain : Error { using Error::Error; };
struct MissingSide : Error { using Error::Error; };
struct EmptyPositivePart : Error { using Error::Error; };
struct MissingExtension : Error { using Error::Error; };

// Estimator / adaptive failures.
struct NonpositiveMeasure : Error { using Error::Error; };
struct LabelNotInSigma : Error { using Error::Error; };
struct NoFeatures : Error { using Error::Error; };

// Scenario / IO failures.
struct ParseError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct ExpressionError : Error { using Error::Error; };
struct OutputIOError : Error { using Error::Error; };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool nearly_equal(double a, double b, double rel) {
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= rel * scale;
}

}  // namespace defeature
