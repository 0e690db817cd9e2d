#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "lqft/causal.hpp"

namespace fx {

// "a<b a<c b<d c<d" style description; bare names add isolated events.
inline lqft::CausalSet poset(const std::string& spec) {
  std::istringstream is(spec);
  std::string tok;
  std::vector<std::string> names;
  std::vector<std::pair<std::string, std::string>> rel;
  auto add = [&](const std::string& n) {
    for (const auto& m : names)
      if (m == n) return;
    names.push_back(n);
  };
  while (is >> tok) {
    auto lt = tok.find('<');
    if (lt == std::string::npos) {
      add(tok);
      continue;
    }
    std::string a = tok.substr(0, lt), b = tok.substr(lt + 1);
    add(a);
    add(b);
    rel.emplace_back(a, b);
  }
  return lqft::CausalSet(names, rel);
}

inline lqft::CausalSet diamond() { return poset("a<b a<c b<d c<d"); }
inline lqft::CausalSet chain3() { return poset("x<y y<z"); }
inline lqft::CausalSet point(const std::string& n = "p") { return poset(n); }

}  // namespace fx
