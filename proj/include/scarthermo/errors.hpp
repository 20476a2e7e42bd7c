#pragma once

#include <stdexcept>
#include <string>

namespace scarthermo {

struct invalid_input : std::invalid_argument {
    explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

struct insufficient_data : std::runtime_error {
    explicit insufficient_data(const std::string& what) : std::runtime_error(what) {}
};

struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when the zero-energy subspace is degenerate and the product-state
// eigenvector cannot be isolated; callers record this as a rejection.
struct degenerate_scar : std::runtime_error {
    explicit degenerate_scar(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace scarthermo
