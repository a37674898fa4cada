#pragma once

#include <stdexcept>
#include <string>

namespace dualgc {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define DUALGC_ERROR(Name)                                   \
    class Name : public Error {                              \
    public:                                                  \
        using Error::Error;                                  \
    }

DUALGC_ERROR(InputShapeError);
DUALGC_ERROR(GadgetWidthError);
DUALGC_ERROR(CircuitFormatError);
DUALGC_ERROR(EncodingCoverageError);
DUALGC_ERROR(EvaluationError);
DUALGC_ERROR(DecodeError);
DUALGC_ERROR(WidthError);
DUALGC_ERROR(FramingError);
DUALGC_ERROR(ProtocolError);
DUALGC_ERROR(TransportError);
DUALGC_ERROR(UsageError);

#undef DUALGC_ERROR

// A commitment failed to open. `party` names who supplied the bad opening.
class OpeningError : public Error {
public:
    OpeningError(std::string party, const std::string& what)
        : Error(party + ": " + what), party_(std::move(party)) {}
    const std::string& party() const noexcept { return party_; }

private:
    std::string party_;
};

// A coin-toss reveal did not match the earlier commitment.
class CoinTossCheatError : public Error {
public:
    explicit CoinTossCheatError(int party)
        : Error("coin toss: reveal of P" + std::to_string(party) + " does not match its commitment"),
          party_(party) {}
    int party() const noexcept { return party_; }

private:
    int party_;
};

} // namespace dualgc
