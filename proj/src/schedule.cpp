#include "forkbench/schedule.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

#include "forkbench/detail/overloaded.hpp"
#include "forkbench/error.hpp"

namespace forkbench {

namespace {

using detail::Overloaded;

std::string normalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::size_t parse_chunk(std::string_view token) {
  std::size_t value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (token.empty() || ec != std::errc{} || ptr != last || value == 0) {
    throw ParseError("invalid chunk '" + std::string(token) + "': expected a positive integer");
  }
  return value;
}

}  // namespace

std::string_view policy_name(const SchedulePolicy& policy) noexcept {
  return std::visit(Overloaded{
                        [](const Static&) { return std::string_view("static"); },
                        [](const Dynamic&) { return std::string_view("dynamic"); },
                        [](const Guided&) { return std::string_view("guided"); },
                        [](const Runtime&) { return std::string_view("runtime"); },
                    },
                    policy);
}

std::optional<std::size_t> policy_chunk(const SchedulePolicy& policy) noexcept {
  return std::visit(Overloaded{
                        [](const Static& s) { return s.chunk; },
                        [](const Dynamic& d) { return std::optional<std::size_t>(d.chunk); },
                        [](const Guided& g) { return std::optional<std::size_t>(g.min_chunk); },
                        [](const Runtime&) { return std::optional<std::size_t>(); },
                    },
                    policy);
}

std::string to_string(const SchedulePolicy& policy) {
  std::string out(policy_name(policy));
  if (auto chunk = policy_chunk(policy)) out += "," + std::to_string(*chunk);
  return out;
}

void validate(const SchedulePolicy& policy) {
  if (auto chunk = policy_chunk(policy); chunk && *chunk == 0) {
    throw ContractError("schedule chunk must be >= 1");
  }
}

SchedulePolicy make_policy(std::string_view name, std::optional<std::size_t> chunk) {
  const std::string key = normalize(name);
  if (chunk && *chunk == 0) throw ContractError("schedule chunk must be >= 1");
  if (key == "static") return Static{chunk};
  if (key == "dynamic") return Dynamic{chunk.value_or(1)};
  if (key == "guided") return Guided{chunk.value_or(1)};
  if (key == "runtime") return Runtime{};
  throw ParseError("unknown schedule policy '" + std::string(name) + "'");
}

SchedulePolicy resolve_schedule_from_env(std::optional<std::string_view> env_value) {
  if (!env_value) return Static{};
  const std::string text = normalize(*env_value);
  if (text.empty()) return Static{};

  const auto comma = text.find(',');
  const std::string_view name = std::string_view(text).substr(0, comma);
  std::optional<std::size_t> chunk;
  if (comma != std::string::npos) chunk = parse_chunk(std::string_view(text).substr(comma + 1));

  if (name == "static") return Static{chunk};
  if (name == "dynamic") return Dynamic{chunk.value_or(1)};
  if (name == "guided") return Guided{chunk.value_or(1)};
  throw ParseError("unknown schedule policy '" + std::string(name) + "'");
}

std::optional<std::string> schedule_from_environment() {
  if (const char* value = std::getenv(kScheduleEnvVar)) return std::string(value);
  return std::nullopt;
}

}  // namespace forkbench
