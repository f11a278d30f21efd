#pragma once

#include <stdexcept>
#include <string>

namespace cpf {

// Validation errors map to exit code 1, numerical failures to exit code 2.
enum class ErrorClass { Validation, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
    ErrorClass error_class() const { return cls_; }

private:
    ErrorClass cls_;
};

#define CPF_DEFINE_ERROR(Name, Cls)                                           \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what) : Error(ErrorClass::Cls, what) {} \
    };

CPF_DEFINE_ERROR(ArgumentError, Validation)
CPF_DEFINE_ERROR(WindowTooNarrowError, Validation)
CPF_DEFINE_ERROR(DomainError, Validation)
CPF_DEFINE_ERROR(AssemblyError, Validation)
CPF_DEFINE_ERROR(DimensionError, Validation)
CPF_DEFINE_ERROR(PreconditionError, Validation)
CPF_DEFINE_ERROR(ResourceError, Validation)
CPF_DEFINE_ERROR(ParseError, Validation)
CPF_DEFINE_ERROR(StepSizeError, Numerical)
CPF_DEFINE_ERROR(IncompleteScatteringError, Numerical)
CPF_DEFINE_ERROR(ToleranceError, Numerical)

#undef CPF_DEFINE_ERROR

}  // namespace cpf
