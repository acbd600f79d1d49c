#pragma once

#include <string>

#include "sstkit/error.hpp"

namespace sst {

// Outcome of one agent's autonomous judgement of another agent's promise.
enum class Verdict { kept, not_kept, undetermined };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::kept: return "kept";
        case Verdict::not_kept: return "not_kept";
        case Verdict::undetermined: return "undetermined";
    }
    return "?";
}

inline Verdict verdict_from_string(const std::string& s) {
    if (s == "kept") return Verdict::kept;
    if (s == "not_kept") return Verdict::not_kept;
    if (s == "undetermined") return Verdict::undetermined;
    throw Error("unknown verdict: " + s);
}

}  // namespace sst
