#pragma once

#include <stdexcept>
#include <string>

namespace okrig {

// Exit category used by the CLI: usage errors map to 2, numerical
// failures to 3, file/format problems to 4.
enum class ErrorCategory { Usage = 2, Numeric = 3, Io = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}
    ErrorCategory category() const { return category_; }

private:
    ErrorCategory category_;
};

#define OKRIG_DEFINE_ERROR(name, cat)                                   \
    class name : public Error {                                         \
    public:                                                             \
        explicit name(const std::string& msg) : Error(cat, msg) {}      \
    }

// core_model
OKRIG_DEFINE_ERROR(EmptyIntersection, ErrorCategory::Usage);
OKRIG_DEFINE_ERROR(DuplicateId, ErrorCategory::Usage);

// io_formats
OKRIG_DEFINE_ERROR(ParseError, ErrorCategory::Io);
OKRIG_DEFINE_ERROR(RangeError, ErrorCategory::Io);
OKRIG_DEFINE_ERROR(CodingError, ErrorCategory::Io);
OKRIG_DEFINE_ERROR(IoError, ErrorCategory::Io);
OKRIG_DEFINE_ERROR(SizeMismatch, ErrorCategory::Io);
OKRIG_DEFINE_ERROR(ValidationError, ErrorCategory::Usage);

// similarity
OKRIG_DEFINE_ERROR(NoPolymorphicMarkers, ErrorCategory::Numeric);
OKRIG_DEFINE_ERROR(ZeroVarianceRow, ErrorCategory::Numeric);
OKRIG_DEFINE_ERROR(WeightSumExceedsOne, ErrorCategory::Usage);
OKRIG_DEFINE_ERROR(RegistryMismatch, ErrorCategory::Usage);

// kriging
OKRIG_DEFINE_ERROR(SingularSigma, ErrorCategory::Numeric);
OKRIG_DEFINE_ERROR(RankDeficientZ, ErrorCategory::Numeric);

// evaluation
OKRIG_DEFINE_ERROR(BadFoldCount, ErrorCategory::Usage);

// Metric preconditions violated; cross-validation treats these as a
// missing value for the repeat rather than a fatal error.
class MetricUndefined : public Error {
public:
    explicit MetricUndefined(const std::string& msg)
        : Error(ErrorCategory::Numeric, msg) {}
};
class ConstantVector : public MetricUndefined {
public:
    explicit ConstantVector(const std::string& msg) : MetricUndefined(msg) {}
};
class OneClassOnly : public MetricUndefined {
public:
    explicit OneClassOnly(const std::string& msg) : MetricUndefined(msg) {}
};

// grid_search
OKRIG_DEFINE_ERROR(StepNotUnitFraction, ErrorCategory::Usage);

// baseline
OKRIG_DEFINE_ERROR(RankDeficientDesign, ErrorCategory::Numeric);
OKRIG_DEFINE_ERROR(EmptyMarkerSet, ErrorCategory::Usage);
OKRIG_DEFINE_ERROR(ConvergenceFailure, ErrorCategory::Numeric);

// simulate
OKRIG_DEFINE_ERROR(BadTheta, ErrorCategory::Usage);

#undef OKRIG_DEFINE_ERROR

}  // namespace okrig
