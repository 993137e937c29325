#pragma once

#include <stdexcept>
#include <string>

namespace hbd {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Not enough bits to represent a slack range or an objective bound.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScalingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SizeGuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The accumulated cuts exclude every binary vector.
struct MasterInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelingError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IntegrityError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace hbd
