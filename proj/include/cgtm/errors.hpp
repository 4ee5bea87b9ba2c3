#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cgtm {

/// Base of every engine error. kind() is the stable machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what) : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define CGTM_DEFINE_ERROR(Name)                                                       \
    class Name : public Error {                                                       \
    public:                                                                           \
        explicit Name(const std::string& what) : Error(#Name, what) {}                \
    }

CGTM_DEFINE_ERROR(DomainError);
CGTM_DEFINE_ERROR(SingularMetric);
CGTM_DEFINE_ERROR(NotStatistical);
CGTM_DEFINE_ERROR(OutsideBMq);
CGTM_DEFINE_ERROR(LeftBMq);
CGTM_DEFINE_ERROR(StepRejected);
CGTM_DEFINE_ERROR(DegeneratePlane);
CGTM_DEFINE_ERROR(NotOrthonormal);
CGTM_DEFINE_ERROR(ZeroFiberVector);
CGTM_DEFINE_ERROR(PseudoRiemannianUnsupported);
CGTM_DEFINE_ERROR(SymmetryError);
CGTM_DEFINE_ERROR(UsageError);

#undef CGTM_DEFINE_ERROR

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
        : Error("SyntaxError", message(offset, expected, found)), offset_(offset), expected_(std::move(expected)) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    static std::string message(std::size_t offset, const std::vector<std::string>& expected,
                               const std::string& found) {
        std::string m = "syntax error at byte " + std::to_string(offset) + ": found " + found + ", expected one of {";
        for (std::size_t i = 0; i < expected.size(); ++i) m += (i ? ", " : "") + expected[i];
        return m + "}";
    }

    std::size_t offset_;
    std::vector<std::string> expected_;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(std::string name, std::size_t offset)
        : Error("UnknownIdentifier", "unknown identifier '" + name + "' at byte " + std::to_string(offset)),
          name_(std::move(name)),
          offset_(offset) {}

    const std::string& name() const noexcept { return name_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::string name_;
    std::size_t offset_;
};

/// Spec document does not match the schema; path is a JSON-pointer-like field path.
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& what)
        : Error("SchemaError", path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace cgtm
