#pragma once

#include <stdexcept>
#include <string>

namespace rlsad {

/// Broad failure category, used by the command-line front end to pick an
/// exit status.
enum class ErrorCategory {
	Config = 2,
	Contract = 3,
	Schema = 4,
	Stream = 5,
	Row = 6,
	Io = 7,
	Validation = 8,
};

const char *to_string(ErrorCategory category);

class Error : public std::runtime_error
{
public:
	Error(ErrorCategory category, const std::string &what)
		: std::runtime_error(what), _category(category) {}

	ErrorCategory category() const { return _category; }

private:
	ErrorCategory _category;
};

struct ConfigError : Error {
	explicit ConfigError(const std::string &what) : Error(ErrorCategory::Config, what) {}
};

// Programming errors: dimension mismatches, out-of-range queries.
struct ContractViolation : Error {
	explicit ContractViolation(const std::string &what) : Error(ErrorCategory::Contract, what) {}
};

struct SchemaError : Error {
	explicit SchemaError(const std::string &what) : Error(ErrorCategory::Schema, what) {}
};

struct StreamError : Error {
	explicit StreamError(const std::string &what) : Error(ErrorCategory::Stream, what) {}
};

struct RowError : Error {
	explicit RowError(const std::string &what) : Error(ErrorCategory::Row, what) {}
};

struct IoError : Error {
	explicit IoError(const std::string &what) : Error(ErrorCategory::Io, what) {}
};

struct ValidationError : Error {
	explicit ValidationError(const std::string &what) : Error(ErrorCategory::Validation, what) {}
};

} // namespace rlsad
