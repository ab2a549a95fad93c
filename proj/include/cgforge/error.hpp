#ifndef CGFORGE_ERROR_HPP
#define CGFORGE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cgforge {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: malformed data or config, unknown names, violated preconditions.
class ValidationError : public Error {
public:
    using Error::Error;
};

class ParseError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class EncodingError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class EmptyDatasetError : public ValidationError {
public:
    EmptyDatasetError() : ValidationError("dataset has no rows") {}
};

class ParentSetTooLargeError : public Error {
public:
    using Error::Error;
};

// Unreachable structural states (cycles in a Dag that should be acyclic).
class StructuralError : public Error {
public:
    using Error::Error;
};

}  // namespace cgforge

#endif  // CGFORGE_ERROR_HPP
