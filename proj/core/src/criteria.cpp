#include "ecoreport/criteria.hpp"

#include <unordered_set>

#include "csv.hpp"
#include "ecoreport/error.hpp"

namespace ecoreport {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

CriteriaSet default_criteria() {
  return {
      {"v1",
       "Corporate environmental or HSE (health, safety and environment) policy statement",
       {"environmental policy", "environment policy", "hse policy",
        "health safety and environment"},
       10},
      {"v2",
       "Corporate policy or company views on 'sustainability' or 'sustainable development'",
       {"sustainability", "sustainable development"},
       10},
      {"v3",
       "CEO statements on 'environmental issues' and/or 'sustainable development/sustainable issues'",
       {"ceo", "chief executive", "environmental issues", "sustainable issues"},
       10},
      {"v4",
       "Carbon dioxide emissions and/or global warming impact and/or climate change",
       {"carbon dioxide emissions", "carbon dioxide", "co2", "global warming",
        "climate change"},
       10},
      {"v5", "'Toxic waste' and/or 'toxic emissions'", {"toxic waste", "toxic emissions"}, 10},
      {"v6", "'Employee turnover' and 'employee retention'",
       {"employee turnover", "employee retention"}, 10},
      {"v7", "Equal opportunities and/or diversity",
       {"equal opportunities", "equal opportunity", "diversity"}, 10},
      {"v8", "References to 'human rights'", {"human rights"}, 10},
      {"v9", "'Shareholder value' and/or 'share price' and/or 'dividends'",
       {"shareholder value", "share price", "dividends", "dividend"}, 10},
      {"v10",
       "Reference to 'customer satisfaction' and/or 'customer transactions' and/or 'sales'",
       {"customer satisfaction", "customer transactions", "sales"},
       10},
  };
}

CriteriaSet parse_criteria(std::string_view text, std::string_view source) {
  CriteriaSet out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto where = [&] { return std::string(source) + ":" + std::to_string(line_no) + ": "; };

  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError(where() + "malformed section header");
      Criterion c;
      c.id = std::string(trim(line.substr(1, line.size() - 2)));
      if (c.id.empty()) throw ValidationError(where() + "empty criterion id");
      out.push_back(std::move(c));
      continue;
    }
    if (out.empty()) throw ValidationError(where() + "content before the first [criterion]");
    Criterion& cur = out.back();

    const auto eq = line.find('=');
    if (eq != std::string_view::npos) {
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (key == "label") {
        cur.label = std::string(value);
      } else if (key == "max_score") {
        cur.max_score = static_cast<int>(csv::parse_int(value, where() + "max_score"));
      } else {
        throw ValidationError(where() + "unknown key '" + std::string(key) + "'");
      }
      continue;
    }
    cur.alternatives.emplace_back(line);
  }
  validate_criteria(out);
  return out;
}

CriteriaSet load_criteria(const std::filesystem::path& path) {
  return parse_criteria(csv::read_text(path), path.string());
}

std::string format_criteria(const CriteriaSet& criteria) {
  std::string out;
  for (const auto& c : criteria) {
    if (!out.empty()) out += '\n';
    out += "[" + c.id + "]\n";
    out += "label = " + c.label + "\n";
    out += "max_score = " + std::to_string(c.max_score) + "\n";
    for (const auto& a : c.alternatives) out += a + "\n";
  }
  return out;
}

void validate_criteria(const CriteriaSet& criteria) {
  if (criteria.empty()) throw ValidationError("criteria set is empty");
  std::unordered_set<std::string> ids;
  for (const auto& c : criteria) {
    if (c.id.empty()) throw ValidationError("criterion with empty id");
    if (!ids.insert(c.id).second) throw ValidationError("duplicate criterion id '" + c.id + "'");
    if (c.alternatives.empty())
      throw ValidationError("criterion '" + c.id + "' has no phrase alternatives");
    if (c.max_score <= 0)
      throw ValidationError("criterion '" + c.id + "' has non-positive max_score");
  }
}

std::vector<std::string> criterion_ids(const CriteriaSet& criteria) {
  std::vector<std::string> ids;
  ids.reserve(criteria.size());
  for (const auto& c : criteria) ids.push_back(c.id);
  return ids;
}

}  // namespace ecoreport
