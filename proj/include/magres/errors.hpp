#pragma once

#include <stdexcept>

namespace magres {

/// Invalid configuration or argument values. CLI exit code 2.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Filesystem or serialization failure. CLI exit code 3.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numeric or task-level failure inside an experiment. CLI exit code 4.
struct task_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace magres
