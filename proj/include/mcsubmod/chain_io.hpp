#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcsubmod/chain.hpp"

namespace mcsubmod {

inline constexpr double kLoadedStationaryTolerance = 1e-6;

struct LoadedChain
{
  TransitionMatrix P;
  Distribution pi;
  bool stationary_supplied{false};
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string format_real(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

}  // namespace detail

/// Chain file text: {"d", "dims", "transition", optional "stationary"} with 17 significant digits.
inline std::string chain_to_json(TransitionMatrix const &p, Distribution const *pi = nullptr)
{
  std::ostringstream out;
  auto const dims = p.space().dims();
  out << "{\n  \"d\": " << dims.size() << ",\n  \"dims\": [";
  for (std::size_t i = 0; i < dims.size(); ++i)
  {
    out << (i ? ", " : "") << dims[i];
  }
  out << "],\n  \"transition\": [\n";
  for (std::size_t x = 0; x < p.size(); ++x)
  {
    out << "    [";
    for (std::size_t y = 0; y < p.size(); ++y)
    {
      out << (y ? ", " : "") << detail::format_real(p(x, y));
    }
    out << (x + 1 < p.size() ? "],\n" : "]\n");
  }
  out << "  ]";
  if (pi)
  {
    out << ",\n  \"stationary\": [";
    for (std::size_t x = 0; x < pi->size(); ++x)
    {
      out << (x ? ", " : "") << detail::format_real((*pi)[x]);
    }
    out << "]";
  }
  out << "\n}\n";
  return out.str();
}

inline void save_chain(std::string const &path, TransitionMatrix const &p, Distribution const *pi = nullptr)
{
  std::ofstream file(path);
  if (!file)
  {
    throw FormatError("cannot open '" + path + "' for writing");
  }
  file << chain_to_json(p, pi);
  if (!file)
  {
    throw FormatError("failed writing '" + path + "'");
  }
}

/// Parses and validates a chain document. A supplied stationary vector whose residual
/// exceeds 1e-6 is replaced by a recomputed one, with a warning.
inline LoadedChain chain_from_json(std::string const &text)
{
  nlohmann::json doc;
  try
  {
    doc = nlohmann::json::parse(text);
  }
  catch (nlohmann::json::parse_error const &e)
  {
    throw FormatError(std::string("malformed chain JSON: ") + e.what());
  }
  try
  {
    if (!doc.is_object() || !doc.contains("dims") || !doc.contains("transition"))
    {
      throw FormatError("chain JSON needs \"dims\" and \"transition\"");
    }
    auto dims = doc.at("dims").get<std::vector<std::size_t>>();
    if (doc.contains("d") && doc.at("d").get<std::size_t>() != dims.size())
    {
      throw FormatError("\"d\" does not match the length of \"dims\"");
    }
    if (dims.empty())
    {
      throw FormatError("chain needs at least one coordinate");
    }
    ProductStateSpace space(dims);
    auto const rows = doc.at("transition").get<std::vector<std::vector<double>>>();
    if (rows.size() != space.total())
    {
      throw FormatError("transition has " + std::to_string(rows.size()) + " rows, dims imply " +
                        std::to_string(space.total()));
    }
    std::vector<double> flat;
    flat.reserve(space.total() * space.total());
    for (std::size_t x = 0; x < rows.size(); ++x)
    {
      if (rows[x].size() != space.total())
      {
        throw FormatError("transition row " + std::to_string(x) + " has " + std::to_string(rows[x].size()) +
                          " entries, expected " + std::to_string(space.total()));
      }
      flat.insert(flat.end(), rows[x].begin(), rows[x].end());
    }
    TransitionMatrix p(space, std::move(flat));
    require_valid(p);

    LoadedChain out{p, {}, false, {}};
    if (doc.contains("stationary"))
    {
      auto probs = doc.at("stationary").get<std::vector<double>>();
      if (probs.size() != space.total())
      {
        throw FormatError("stationary has " + std::to_string(probs.size()) + " entries, expected " +
                          std::to_string(space.total()));
      }
      Distribution pi(space, std::move(probs));
      double const residual = stationarity_residual(p, pi);
      if (residual > kLoadedStationaryTolerance)
      {
        std::ostringstream msg;
        msg << "supplied stationary distribution has residual " << residual << "; recomputed";
        out.warnings.push_back(msg.str());
        out.pi = stationary_distribution(p);
      }
      else
      {
        require_distribution(pi, 1e-9);
        out.pi = std::move(pi);
        out.stationary_supplied = true;
      }
    }
    else
    {
      out.pi = stationary_distribution(p);
    }
    return out;
  }
  catch (nlohmann::json::exception const &e)
  {
    throw FormatError(std::string("chain JSON has the wrong shape: ") + e.what());
  }
}

inline LoadedChain load_chain(std::string const &path)
{
  std::ifstream file(path);
  if (!file)
  {
    throw FormatError("cannot open chain file '" + path + "'");
  }
  std::stringstream buf;
  buf << file.rdbuf();
  return chain_from_json(buf.str());
}

}  // namespace mcsubmod
