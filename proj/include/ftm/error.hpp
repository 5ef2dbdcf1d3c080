#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ftm {

enum class ErrorKind {
    // structure
    DuplicateId,
    DuplicateState,
    TooFewStates,
    DanglingEdge,
    Cyclic,
    MissingCpt,
    ParentSetMismatch,
    CptShapeMismatch,
    RowNotNormalized,
    BadProbability,
    // queries
    UnknownNode,
    UnknownState,
    IncompleteAssignment,
    ImpossibleEvidence,
    CardinalityMismatch,
    VarNotInScope,
    // interventions and folk theories
    NotRoot,
    NotNormalized,
    NotIntervenable,
    NonObservableEvidence,
    NotLatent,
    InvalidThreshold,
    ObservableMismatch,
    NoFreeParameters,
    InvalidArgument,
    // io
    SyntaxError,
    UnknownNodeReference,
    DuplicateDefinition,
    Io,
};

inline std::string_view to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::DuplicateState: return "DuplicateState";
    case ErrorKind::TooFewStates: return "TooFewStates";
    case ErrorKind::DanglingEdge: return "DanglingEdge";
    case ErrorKind::Cyclic: return "Cyclic";
    case ErrorKind::MissingCpt: return "MissingCpt";
    case ErrorKind::ParentSetMismatch: return "ParentSetMismatch";
    case ErrorKind::CptShapeMismatch: return "CptShapeMismatch";
    case ErrorKind::RowNotNormalized: return "RowNotNormalized";
    case ErrorKind::BadProbability: return "BadProbability";
    case ErrorKind::UnknownNode: return "UnknownNode";
    case ErrorKind::UnknownState: return "UnknownState";
    case ErrorKind::IncompleteAssignment: return "IncompleteAssignment";
    case ErrorKind::ImpossibleEvidence: return "ImpossibleEvidence";
    case ErrorKind::CardinalityMismatch: return "CardinalityMismatch";
    case ErrorKind::VarNotInScope: return "VarNotInScope";
    case ErrorKind::NotRoot: return "NotRoot";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::NotIntervenable: return "NotIntervenable";
    case ErrorKind::NonObservableEvidence: return "NonObservableEvidence";
    case ErrorKind::NotLatent: return "NotLatent";
    case ErrorKind::InvalidThreshold: return "InvalidThreshold";
    case ErrorKind::ObservableMismatch: return "ObservableMismatch";
    case ErrorKind::NoFreeParameters: return "NoFreeParameters";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownNodeReference: return "UnknownNodeReference";
    case ErrorKind::DuplicateDefinition: return "DuplicateDefinition";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

// One located problem with a model. `locus` names the node, edge or row
// involved; `value` carries a numeric detail (row sum, expected rows) when
// the kind has one.
struct Finding {
    ErrorKind kind;
    std::string locus;
    std::string message;
    double value = 0.0;
};

class ModelError : public std::runtime_error {
public:
    ModelError(ErrorKind kind, std::string message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          kind_(kind),
          findings_{Finding{kind, {}, std::move(message)}} {}

    explicit ModelError(std::vector<Finding> findings)
        : std::runtime_error(summarize(findings)),
          kind_(findings.empty() ? ErrorKind::InvalidArgument : findings.front().kind),
          findings_(std::move(findings)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::vector<Finding>& findings() const noexcept { return findings_; }

private:
    static std::string summarize(const std::vector<Finding>& fs) {
        std::string out;
        for (const auto& f : fs) {
            if (!out.empty()) out += "; ";
            out += std::string(to_string(f.kind)) + ": " + f.message;
        }
        return out;
    }

    ErrorKind kind_;
    std::vector<Finding> findings_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string message) {
    throw ModelError(kind, std::move(message));
}

}  // namespace ftm
