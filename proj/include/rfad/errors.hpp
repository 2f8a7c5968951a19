#pragma once

#include <stdexcept>
#include <string>

namespace rfad {

// Common base so callers can catch every library error with one handler.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class MissingFileError : public Error { public: using Error::Error; };
class CsvFormatError : public Error { public: using Error::Error; };
class RaggedRowError : public Error { public: using Error::Error; };
class EmptyCellError : public Error { public: using Error::Error; };
class NonFiniteValueError : public Error { public: using Error::Error; };
class SchemaMismatchError : public Error { public: using Error::Error; };
class EmptySampleError : public Error { public: using Error::Error; };
class DegenerateSplitError : public Error { public: using Error::Error; };
class KTooLargeError : public Error { public: using Error::Error; };
class OneClassOnlyError : public Error { public: using Error::Error; };
class DegenerateSubsampleError : public Error { public: using Error::Error; };
class InvalidArgumentError : public Error { public: using Error::Error; };

}  // namespace rfad
