#pragma once

#include <stdexcept>
#include <string>

namespace nasal {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file. Carries a best-effort line (text formats) or byte
/// offset (binary formats); -1 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, long line, long byte_offset = -1)
        : Error(what + (line >= 0 ? " (line " + std::to_string(line) + ")" : "") +
                (byte_offset >= 0 ? " (byte " + std::to_string(byte_offset) + ")" : "")),
          line_(line),
          byte_offset_(byte_offset) {}

    long line() const { return line_; }
    long byte_offset() const { return byte_offset_; }

private:
    long line_;
    long byte_offset_;
};

/// Input that is structurally valid but geometrically unusable
/// (empty cloud, collinear points, degenerate crop, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A landmark or curve could not be recovered from an otherwise valid surface.
class LandmarkingError : public Error {
public:
    using Error::Error;
};

}  // namespace nasal
