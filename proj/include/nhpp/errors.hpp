#ifndef NHPP_ERRORS_HPP
#define NHPP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nhpp {

// Invalid arguments or out-of-contract inputs to library operations.
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Model or run configuration that cannot be realized (bad parameters, schema).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent data files (catalogs, maps, chains).
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical procedures that failed to converge or lost validity.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace nhpp

#endif
