#include "relkit/atom.hpp"

#include <charconv>
#include <cstdlib>

namespace relkit {

Constant Constant::parse(std::string_view s) {
  Constant c;
  c.text.assign(s.begin(), s.end());
  if (!s.empty()) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec == std::errc() && ptr == last) {
      c.numeric = true;
      c.value = v;
    }
  }
  return c;
}

Constant Constant::from_number(double v) {
  Constant c;
  c.text = format_number(v);
  c.numeric = true;
  c.value = v;
  return c;
}

std::string format_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Atom Atom::make(std::string_view pred,
                std::initializer_list<std::string_view> a) {
  Atom atom;
  atom.predicate.assign(pred.begin(), pred.end());
  for (auto s : a) atom.args.push_back(Constant::parse(s));
  return atom;
}

std::string Atom::to_string() const {
  if (args.empty()) return predicate;
  std::string out = predicate;
  out += '(';
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ',';
    out += args[i].text;
  }
  out += ')';
  return out;
}

}  // namespace relkit
