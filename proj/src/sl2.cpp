#include "nilnf/sl2.hpp"

#include <cctype>
#include <sstream>

namespace nilnf {

JordanType JordanType::parse(const std::string& text) {
  JordanType jt;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    std::size_t used = 0;
    int v = std::stoi(cur, &used);
    if (used != cur.size()) throw std::invalid_argument("bad Jordan block size: " + cur);
    jt.blocks.push_back(v);
    cur.clear();
  };
  for (char ch : text) {
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      cur += ch;
    } else if (ch == ',' || ch == ' ' || ch == '[' || ch == ']') {
      flush();
    } else {
      throw std::invalid_argument("bad Jordan type: " + text);
    }
  }
  flush();
  if (jt.blocks.empty()) throw std::invalid_argument("empty Jordan type");
  return jt;
}

std::string JordanType::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < blocks.size(); ++i) os << (i ? "," : "") << blocks[i];
  os << "]";
  return os.str();
}

void JordanType::validate() const {
  if (blocks.empty()) throw PreconditionError("Jordan type has no blocks");
  for (int b : blocks)
    if (b < 2) throw PreconditionError("Jordan block of size " + std::to_string(b) + " (regular nilpotent needs >= 2)");
  if (dim() > kMaxVariables) throw PreconditionError("total dimension exceeds 8");
}

}  // namespace nilnf
