#pragma once

#include <stdexcept>
#include <string>

namespace hfl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define HFL_ERROR(Name)                                                   \
    struct Name : Error {                                                 \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

HFL_ERROR(ZeroInput);
HFL_ERROR(PrecisionExhausted);
HFL_ERROR(Inseparable);
HFL_ERROR(SingularInput);
HFL_ERROR(NotStronglyRegular);
HFL_ERROR(NotRegularSS);
HFL_ERROR(NotInImage);
HFL_ERROR(OutsideFiltrationSpan);
HFL_ERROR(NotRepresentable);
HFL_ERROR(RepresentativeSearchFailed);
HFL_ERROR(OnSingularDivisor);
HFL_ERROR(NotIntegral);
HFL_ERROR(WindowInsufficient);
HFL_ERROR(CellBoundUncertified);
HFL_ERROR(UnknownCheck);
HFL_ERROR(PoleAtZero);
HFL_ERROR(InvalidConfig);

#undef HFL_ERROR

} // namespace hfl
