#pragma once
#include <stdexcept>
#include <string>

namespace mpmat {

struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

struct shape_error : error {
    explicit shape_error(const std::string& msg) : error(msg) {}
};

struct param_error : error {
    explicit param_error(const std::string& msg) : error(msg) {}
};

struct singular_error : error {
    explicit singular_error(const std::string& msg) : error(msg) {}
};

struct io_error : error {
    explicit io_error(const std::string& msg) : error(msg) {}
};

} // namespace mpmat
