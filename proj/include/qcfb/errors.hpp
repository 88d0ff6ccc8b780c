#ifndef QCFB_ERRORS_HPP
#define QCFB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qcfb {

enum class ErrorCode {
    DegenerateBody,
    EmptyInset,
    EmptyInput,
    EmptyLevel,
    DomainError,
    InvalidSpec,
    StencilClipped,
    UnsupportedKind,
    SandwichViolated,
    NoConvergence,
    LineSearchStalled,
    ConstraintViolated,
    OriginOutsideK,
    ShootingFailed,
    GeometryNotRadial,
    SchemaMismatch,
    Resize,
};

inline const char* error_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::DegenerateBody: return "DegenerateBody";
        case ErrorCode::EmptyInset: return "EmptyInset";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::EmptyLevel: return "EmptyLevel";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::StencilClipped: return "StencilClipped";
        case ErrorCode::UnsupportedKind: return "UnsupportedKind";
        case ErrorCode::SandwichViolated: return "SandwichViolated";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::LineSearchStalled: return "LineSearchStalled";
        case ErrorCode::ConstraintViolated: return "ConstraintViolated";
        case ErrorCode::OriginOutsideK: return "OriginOutsideK";
        case ErrorCode::ShootingFailed: return "ShootingFailed";
        case ErrorCode::GeometryNotRadial: return "GeometryNotRadial";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::Resize: return "Resize";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace qcfb

#endif
