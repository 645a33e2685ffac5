#pragma once

#include <stdexcept>
#include <string>

namespace gsdfront {

// Raised for malformed or inconsistent input data (files, tables, records).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gsdfront
