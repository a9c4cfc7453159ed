#ifndef MAVG_ERRORS_HPP
#define MAVG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mavg {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix projection onto SO(3) is ambiguous (two or more near-zero
/// singular values).
class DegenerateMatrix : public Error {
public:
    explicit DegenerateMatrix(const std::string& what) : Error(what) {}
};

/// Two camera centers coincide, so no baseline direction exists.
class CoincidentCenters : public Error {
public:
    explicit CoincidentCenters(const std::string& what) : Error(what) {}
};

/// Point configuration does not determine the requested alignment.
class DegenerateConfiguration : public Error {
public:
    explicit DegenerateConfiguration(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& reason)
        : Error("parse error at line " + std::to_string(line) + ": " + reason),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class DuplicateEdge : public Error {
public:
    explicit DuplicateEdge(const std::string& what) : Error(what) {}
};

class UnknownNodeRef : public Error {
public:
    explicit UnknownNodeRef(const std::string& what) : Error(what) {}
};

class UnknownNode : public Error {
public:
    explicit UnknownNode(const std::string& what) : Error(what) {}
};

class NodeSetMismatch : public Error {
public:
    explicit NodeSetMismatch(const std::string& what) : Error(what) {}
};

class NotConnected : public Error {
public:
    explicit NotConnected(const std::string& what) : Error(what) {}
};

class EigenFailure : public Error {
public:
    explicit EigenFailure(const std::string& what) : Error(what) {}
};

class MissingGroundTruth : public Error {
public:
    explicit MissingGroundTruth(const std::string& what) : Error(what) {}
};

class GenerationFailed : public Error {
public:
    explicit GenerationFailed(const std::string& what) : Error(what) {}
};

class SingularKKT : public Error {
public:
    explicit SingularKKT(const std::string& what) : Error(what) {}
};

class NoRotations : public Error {
public:
    explicit NoRotations(const std::string& what) : Error(what) {}
};

class EmptyDataset : public Error {
public:
    explicit EmptyDataset(const std::string& what) : Error(what) {}
};

class LengthMismatch : public Error {
public:
    explicit LengthMismatch(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

} // namespace mavg

#endif // MAVG_ERRORS_HPP
