#pragma once

#include <stdexcept>
#include <string>

namespace zkl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define ZKL_ERROR(Name)                                            \
    struct Name : Error {                                          \
        explicit Name(const std::string& what = #Name) : Error(what) {} \
    }

ZKL_ERROR(OutOfRange);
ZKL_ERROR(DimensionMismatch);
ZKL_ERROR(FoldOnConstant);
ZKL_ERROR(KeyTooSmall);
ZKL_ERROR(DegreeOverflow);
ZKL_ERROR(PoleCollision);
ZKL_ERROR(PrecondViolation);
ZKL_ERROR(ShapeMismatch);
ZKL_ERROR(RangeViolation);
ZKL_ERROR(DigitOutOfRange);
ZKL_ERROR(NormalizationBudgetExceeded);
ZKL_ERROR(TokenOutOfVocab);
ZKL_ERROR(TraceMismatch);
ZKL_ERROR(ConfigInvalid);
ZKL_ERROR(IOFailure);
ZKL_ERROR(ParseError);
ZKL_ERROR(VersionMismatch);
ZKL_ERROR(TruncatedFile);
ZKL_ERROR(EmptyDataset);
ZKL_ERROR(VocabTooLarge);

#undef ZKL_ERROR

struct ElementNotInTable : Error {
    std::size_t index;
    explicit ElementNotInTable(std::size_t i)
        : Error("element not in table at index " + std::to_string(i)), index(i) {}
};

}  // namespace zkl
