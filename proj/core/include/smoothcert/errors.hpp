#pragma once

#include <stdexcept>
#include <string>

namespace smoothcert {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Vectors/matrices of incompatible lengths.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Values outside their declared symbol domain, probabilities outside [0,1].
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed binary containers (IDX files, dataset/ensemble files).
class FormatError : public Error {
public:
    using Error::Error;
};

// Well-formed input that cannot satisfy the request (e.g. too few examples).
class DataError : public Error {
public:
    using Error::Error;
};

// Inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Training produced non-finite loss or weights.
class TrainingError : public Error {
public:
    using Error::Error;
};

} // namespace smoothcert
