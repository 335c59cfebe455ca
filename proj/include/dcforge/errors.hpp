#pragma once

#include <stdexcept>
#include <string>

namespace dcforge {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define DCFORGE_ERROR(Name)                 \
    class Name : public Error {             \
    public:                                 \
        using Error::Error;                 \
    }

DCFORGE_ERROR(DomainError);
DCFORGE_ERROR(UnboundedDomainError);
DCFORGE_ERROR(UnboundedAuxiliary);
DCFORGE_ERROR(ArgumentError);
DCFORGE_ERROR(CertificationError);
DCFORGE_ERROR(ScaleError);
DCFORGE_ERROR(EmptyPolyhedron);
DCFORGE_ERROR(NotInDomain);
DCFORGE_ERROR(FailedCopositivity);
DCFORGE_ERROR(NotPositiveDefinite);
DCFORGE_ERROR(RegionNotInDomain);
DCFORGE_ERROR(PieceNotQuadratic);
DCFORGE_ERROR(EmptyRegion);
DCFORGE_ERROR(NonConvexUnion);
DCFORGE_ERROR(NotDcError);
DCFORGE_ERROR(ParseError);

#undef DCFORGE_ERROR

} // namespace dcforge
