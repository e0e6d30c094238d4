#pragma once

#include <stdexcept>
#include <string>

namespace ssc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// translator
struct UnsupportedCharacter : Error { using Error::Error; };
struct UnrecognizedGlyph : Error { using Error::Error; };
struct PngError : Error { using Error::Error; };

// core model
struct MissingImage : Error { using Error::Error; };
struct MissingTranslation : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

// generators
struct Exhausted : Error { using Error::Error; };
struct UnknownTaskKind : Error { using Error::Error; };

// model clients
struct InvalidParams : Error { using Error::Error; };
struct TransportError : Error { using Error::Error; };
struct Timeout : TransportError { using TransportError::TransportError; };
struct RateLimited : TransportError { using TransportError::TransportError; };
struct MalformedResponse : Error { using Error::Error; };

// metrics / scaling / audit
struct MissingCondition : Error { using Error::Error; };
struct TooFewItems : Error { using Error::Error; };
struct InvalidGrid : Error { using Error::Error; };
struct TooFewPoints : Error { using Error::Error; };
struct NoCompleteWindow : Error { using Error::Error; };

}  // namespace ssc
