#pragma once

#include <stdexcept>
#include <string>

namespace connexa {

enum class ErrorKind {
    OrderMismatch,
    NotAUnit,
    CompositionUndefined,
    NotInvertible,
    Parse,
    Precondition,
    NoSolution,
    Exactness,
    Shape,
    NoExtension,
    Domain,
    ReductionFailed,
    UnfoldingViolation,
    Unsupported,
    DegreeOverflow,
};

inline const char* kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::OrderMismatch: return "order-mismatch";
        case ErrorKind::NotAUnit: return "not-a-unit";
        case ErrorKind::CompositionUndefined: return "composition-undefined";
        case ErrorKind::NotInvertible: return "not-invertible";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::NoSolution: return "no-formal-solution";
        case ErrorKind::Exactness: return "exact-field";
        case ErrorKind::Shape: return "shape";
        case ErrorKind::NoExtension: return "no-extension";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::ReductionFailed: return "reduction-failed";
        case ErrorKind::UnfoldingViolation: return "unfolding-violation";
        case ErrorKind::Unsupported: return "unsupported-shape";
        case ErrorKind::DegreeOverflow: return "t1-degree-overflow";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind k, const std::string& msg)
        : std::runtime_error(std::string(kind_name(k)) + ": " + msg), kind_(k) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace connexa
