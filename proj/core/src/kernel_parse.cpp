#include "ninput/kernel_parse.hpp"

#include <string>

#include "ninput/errors.hpp"

namespace ninput {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

ParamMap parse_params(std::string_view text) {
  ParamMap params;
  std::string last_key;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view token =
        trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    const std::size_t eq = token.find('=');
    if (eq != std::string_view::npos) {
      last_key = std::string(trim(token.substr(0, eq)));
      if (last_key.empty()) throw InvalidArgument("kernel spec: empty parameter name");
      if (params.count(last_key)) throw InvalidArgument("kernel spec: duplicate parameter " + last_key);
      params[last_key] = std::string(trim(token.substr(eq + 1)));
    } else if (!token.empty()) {
      if (last_key.empty()) throw InvalidArgument("kernel spec: expected key=value, got '" + std::string(token) + "'");
      params[last_key] += "," + std::string(token);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return params;
}

}  // namespace

KernelSpec parse_kernel(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw InvalidArgument("kernel spec: empty");

  const std::size_t paren = text.find('(');
  const std::size_t colon = text.find(':');
  if (paren != std::string_view::npos && (colon == std::string_view::npos || paren < colon)) {
    const std::string_view head = trim(text.substr(0, paren));
    if (text.back() != ')') throw InvalidArgument("kernel spec: missing ')'");
    const std::string_view inside = text.substr(paren + 1, text.size() - paren - 2);
    // last top-level comma separates the lifted kernel from n
    int depth = 0;
    std::size_t split = std::string_view::npos;
    for (std::size_t i = 0; i < inside.size(); ++i) {
      if (inside[i] == '(') ++depth;
      if (inside[i] == ')') --depth;
      if (inside[i] == ',' && depth == 0) split = i;
    }
    if (split == std::string_view::npos) throw InvalidArgument("kernel spec: expected " + std::string(head) + "(kernel,n)");
    const KernelSpec base = parse_kernel(inside.substr(0, split));
    int n = 0;
    try {
      n = std::stoi(std::string(trim(inside.substr(split + 1))));
    } catch (const std::exception&) {
      throw InvalidArgument("kernel spec: bad arity in " + std::string(text));
    }
    if (head == "sum_lift") return sum_lift(base, n);
    if (head == "prod_lift") return prod_lift(base, n);
    throw InvalidArgument("kernel spec: unknown construction '" + std::string(head) + "'");
  }

  if (colon == std::string_view::npos) return make_kernel(std::string(text));
  return make_kernel(std::string(trim(text.substr(0, colon))), parse_params(text.substr(colon + 1)));
}

}  // namespace ninput
