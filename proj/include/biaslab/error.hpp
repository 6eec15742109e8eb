#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace biaslab {

enum class ErrorKind {
    ParseError,
    UnknownNode,
    DuplicateNode,
    DuplicateEdge,
    CyclicGraph,
    InfeasibleStandardization,
    InvalidArgument,
    SingularDesign,
    DegenerateInstrument,
    DegenerateSelection,
    DomainError,
    NonpositiveVariance,
    UnknownColumn,
    EmptySelection,
    InsufficientData,
    InvalidQuery,
    InvalidInstrument,
    InfeasibleModel,
    IoError,
    InvariantViolation,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::UnknownNode: return "UnknownNode";
        case ErrorKind::DuplicateNode: return "DuplicateNode";
        case ErrorKind::DuplicateEdge: return "DuplicateEdge";
        case ErrorKind::CyclicGraph: return "CyclicGraph";
        case ErrorKind::InfeasibleStandardization: return "InfeasibleStandardization";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::SingularDesign: return "SingularDesign";
        case ErrorKind::DegenerateInstrument: return "DegenerateInstrument";
        case ErrorKind::DegenerateSelection: return "DegenerateSelection";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::NonpositiveVariance: return "NonpositiveVariance";
        case ErrorKind::UnknownColumn: return "UnknownColumn";
        case ErrorKind::EmptySelection: return "EmptySelection";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::InvalidQuery: return "InvalidQuery";
        case ErrorKind::InvalidInstrument: return "InvalidInstrument";
        case ErrorKind::InfeasibleModel: return "InfeasibleModel";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace biaslab
