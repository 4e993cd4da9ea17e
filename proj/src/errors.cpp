#include "rlsad/errors.hpp"

namespace rlsad {

const char *to_string(ErrorCategory category)
{
	switch (category) {
	case ErrorCategory::Config: return "config";
	case ErrorCategory::Contract: return "contract";
	case ErrorCategory::Schema: return "schema";
	case ErrorCategory::Stream: return "stream";
	case ErrorCategory::Row: return "row";
	case ErrorCategory::Io: return "io";
	case ErrorCategory::Validation: return "validation";
	}

	return "unknown";
}

} // namespace rlsad
