#pragma once

#include <string_view>

namespace qms {

enum class Verdict { Yes, No, Inconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

}  // namespace qms
