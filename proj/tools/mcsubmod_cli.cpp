#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcsubmod/mcsubmod.hpp"

using namespace mcsubmod;
using nlohmann::json;

namespace {

constexpr int kExitFlags = 2;
constexpr int kExitModel = 3;
constexpr int kExitGuard = 4;

struct ModelFlags
{
  std::string model{"curie-weiss"};
  std::string chain_path;
  std::size_t d{10};
  double T{10.0};
  double h{1.0};
};

void add_model_flags(CLI::App *cmd, ModelFlags &m)
{
  cmd->add_option("--model", m.model, "curie-weiss or file")->check(CLI::IsMember({"curie-weiss", "file"}));
  cmd->add_option("--chain", m.chain_path, "chain JSON file (with --model file)");
  cmd->add_option("--d", m.d, "Curie-Weiss dimension");
  cmd->add_option("--T", m.T, "Curie-Weiss temperature");
  cmd->add_option("--h", m.h, "Curie-Weiss external field");
}

std::pair<TransitionMatrix, Distribution> load_model(ModelFlags const &m)
{
  if (m.model == "file")
  {
    if (m.chain_path.empty())
    {
      throw InvalidArgument("--model file needs --chain");
    }
    auto loaded = load_chain(m.chain_path);
    for (auto const &w : loaded.warnings)
    {
      std::cerr << "warning: " << w << "\n";
    }
    return {std::move(loaded.P), std::move(loaded.pi)};
  }
  return curie_weiss_chain({m.d, m.T, m.h});
}

std::vector<std::size_t> parse_list(std::string const &text, std::string const &flag)
{
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
  {
    try
    {
      std::size_t used = 0;
      auto const v = std::stoull(item, &used);
      if (used != item.size())
      {
        throw std::invalid_argument(item);
      }
      out.push_back(static_cast<std::size_t>(v));
    }
    catch (std::exception const &)
    {
      throw InvalidArgument(flag + ": '" + item + "' is not a non-negative integer");
    }
  }
  return out;
}

SubsetMask parse_coordinates(std::string const &text, std::size_t d, std::string const &flag)
{
  SubsetMask s = SubsetMask::empty(d);
  if (text.empty())
  {
    return s;
  }
  for (auto label : parse_list(text, flag))
  {
    if (label == 0 || label > d)
    {
      throw InvalidArgument(flag + ": coordinate " + std::to_string(label) + " outside 1.." + std::to_string(d));
    }
    s = s.with(label - 1);
  }
  return s;
}

Partition parse_ceiling(std::string const &text, std::size_t d)
{
  if (text.empty())
  {
    return Partition(std::vector<SubsetMask>{SubsetMask::full(d)});
  }
  std::vector<SubsetMask> parts;
  std::stringstream in(text);
  std::string group;
  while (std::getline(in, group, '|'))
  {
    parts.push_back(parse_coordinates(group, d, "--V"));
  }
  return Partition(std::move(parts));
}

std::string format_value(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10f", v == 0.0 ? 0.0 : v);
  return buf;
}

/// Reported value recomputed from the direct KL / entropy-rate definitions.
double direct_value(std::string const &id, TransitionMatrix const &p, Distribution const &pi, SubsetMask const &s,
                    std::optional<SubsetMask> const &w)
{
  auto rate = [&](SubsetMask a) {
    return a.empty() ? 0.0 : entropy_rate(project_keep_in(p, pi, a), marginalize(pi, a));
  };
  if (id == "entropy" || id == "entropy-product-form")
  {
    return rate(s);
  }
  if (id == "dist2fact")
  {
    return distance_to_factorizability(p, pi, s);
  }
  if (id == "dist2indp")
  {
    return distance_to_independence(p, pi, s);
  }
  if (id == "dist2indp-complement")
  {
    return distance_to_independence(p, pi, s.complement());
  }
  if (id == "dist2stat-product-form" || id == "dist2stat-monotone")
  {
    return distance_to_stationarity(p, pi, s);
  }
  if (id == "dist2stat-complement")
  {
    return distance_to_stationarity(p, pi, s.complement());
  }
  if (id == "dist2fact-fixed")
  {
    return distance_to_factorizability_fixed(p, pi, *w, s);
  }
  throw InvalidArgument("no direct evaluation for " + id);
}

double direct_value(std::string const &id, TransitionMatrix const &p, Distribution const &pi, Partition const &s,
                    Partition const &v)
{
  double sum = 0.0;
  if (id == "k-dist2fact")
  {
    auto blocks = s.parts();
    blocks.push_back(s.support().complement());
    return s.empty() ? 0.0 : detail::block_divergence(p, pi, p.space().all(), blocks);
  }
  for (std::size_t i = 0; i < s.k(); ++i)
  {
    auto const part = s.part(i);
    auto const rest = v.part(i) - part;
    if (id == "k-entropy" || id == "k-entropy-product-form")
    {
      sum += part.empty() ? 0.0 : entropy_rate(project_keep_in(p, pi, part), marginalize(pi, part));
    }
    else if (id == "k-dist2indp")
    {
      sum += distance_to_independence(p, pi, part);
    }
    else if (id == "k-dist2indp-complement")
    {
      sum += distance_to_independence(p, pi, rest);
    }
    else if (id == "k-dist2stat")
    {
      sum += distance_to_stationarity(p, pi, part);
    }
    else if (id == "k-dist2stat-complement")
    {
      sum += distance_to_stationarity(p, pi, rest);
    }
    else
    {
      throw InvalidArgument("no direct evaluation for " + id);
    }
  }
  return sum;
}

json trajectory_json(std::vector<Step> const &steps)
{
  json out = json::array();
  for (auto const &s : steps)
  {
    out.push_back({{"iteration", s.iteration},
                   {"slot", s.slot + 1},
                   {"element", s.element + 1},
                   {"marginal", s.marginal},
                   {"score", s.score},
                   {"accepted", s.accepted}});
  }
  return out;
}

json certificate_json(Certificate const &c)
{
  return {{"g_opt", c.g_opt}, {"c_opt", c.c_opt}, {"bound", c.bound}, {"achieved", c.achieved}, {"holds", c.holds}};
}

struct Row
{
  std::size_t m{0};
  std::vector<std::string> labels;
  double value{0.0};
  double seconds{0.0};
};

void write_svg(std::string const &path, std::string const &title, std::vector<Row> const &rows)
{
  std::ofstream out(path);
  if (!out)
  {
    throw FormatError("cannot open '" + path + "' for writing");
  }
  double const width = 640;
  double const height = 400;
  double const pad = 50;
  double vmax = 0.0;
  std::size_t mmin = rows.empty() ? 0 : rows.front().m;
  std::size_t mmax = mmin;
  for (auto const &r : rows)
  {
    vmax = std::max(vmax, r.value);
    mmin = std::min(mmin, r.m);
    mmax = std::max(mmax, r.m);
  }
  double const span = mmax > mmin ? static_cast<double>(mmax - mmin) : 1.0;
  double const top = vmax > 0.0 ? vmax : 1.0;
  auto px = [&](std::size_t m) { return pad + (width - 2 * pad) * static_cast<double>(m - mmin) / span; };
  auto py = [&](double v) { return height - pad - (height - 2 * pad) * v / top; };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<text x=\"" << pad << "\" y=\"25\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  out << "<line x1=\"" << pad << "\" y1=\"" << height - pad << "\" x2=\"" << width - pad << "\" y2=\"" << height - pad
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << height - pad
      << "\" stroke=\"black\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (auto const &r : rows)
  {
    out << px(r.m) << "," << py(r.value) << " ";
  }
  out << "\"/>\n";
  for (auto const &r : rows)
  {
    out << "<circle cx=\"" << px(r.m) << "\" cy=\"" << py(r.value) << "\" r=\"3\" fill=\"steelblue\"/>\n";
    out << "<text x=\"" << px(r.m) << "\" y=\"" << height - pad + 18
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << r.m << "</text>\n";
  }
  out << "<text x=\"" << pad - 5 << "\" y=\"" << pad << "\" font-family=\"sans-serif\" font-size=\"11\" "
      << "text-anchor=\"end\">" << format_value(top) << "</text>\n";
  out << "</svg>\n";
}

struct SelectFlags
{
  ModelFlags model;
  std::string problem;
  std::string algorithm{"greedy"};
  std::optional<std::size_t> m;
  std::optional<std::size_t> m_min;
  std::optional<std::size_t> m_max;
  std::string V;
  std::string W;
  std::optional<double> beta;
  double epsilon{0.1};
  std::string batch_sizes{"ones"};
  bool heuristic{false};
  std::string oracle;
  std::uint64_t seed{0};
  std::string out;
  std::string svg;
  bool timing{false};
};

std::pair<std::size_t, std::size_t> m_range(SelectFlags const &f, std::size_t min_m, std::size_t max_m)
{
  if (f.m)
  {
    if (f.m_min || f.m_max)
    {
      throw InvalidArgument("--m cannot be combined with --m-min/--m-max");
    }
    return {*f.m, *f.m};
  }
  auto const lo = f.m_min.value_or(std::max<std::size_t>(min_m, 1));
  auto const hi = f.m_max.value_or(max_m);
  if (lo > hi)
  {
    throw InvalidArgument("empty m range " + std::to_string(lo) + ".." + std::to_string(hi));
  }
  return {lo, hi};
}

std::vector<std::size_t> batches_for(std::string const &spec, std::size_t m)
{
  if (spec == "ones")
  {
    return std::vector<std::size_t>(m, 1);
  }
  if (spec == "pairs")
  {
    return pairs_batches(m);
  }
  return parse_list(spec, "--batch-sizes");
}

void emit_csv(SelectFlags const &f, std::vector<std::string> const &label_cols, std::vector<Row> const &rows)
{
  std::ostringstream csv;
  csv << "m";
  for (auto const &c : label_cols)
  {
    csv << "," << c;
  }
  csv << ",value";
  if (f.timing)
  {
    csv << ",seconds";
  }
  csv << "\n";
  for (auto const &r : rows)
  {
    csv << r.m;
    for (auto const &l : r.labels)
    {
      csv << "," << l;
    }
    csv << "," << format_value(r.value);
    if (f.timing)
    {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", r.seconds);
      csv << "," << buf;
    }
    csv << "\n";
  }
  if (f.out.empty() || f.out == "-")
  {
    std::cout << csv.str();
  }
  else
  {
    std::ofstream file(f.out);
    if (!file)
    {
      throw FormatError("cannot open '" + f.out + "' for writing");
    }
    file << csv.str();
  }
  if (!f.svg.empty())
  {
    write_svg(f.svg, f.problem + " / " + f.algorithm, rows);
  }
}

void write_oracle(std::string const &path, json const &doc)
{
  std::ofstream file(path);
  if (!file)
  {
    throw FormatError("cannot open '" + path + "' for writing");
  }
  file << doc.dump(2) << "\n";
}

void check_drift(double direct, double incremental, std::size_t m)
{
  if (std::abs(direct - incremental) > 1e-9)
  {
    std::cerr << "warning: m=" << m << " optimizer value " << incremental << " differs from direct evaluation "
              << direct << "\n";
  }
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int run_select_subset(SelectFlags const &f, Chain const &chain)
{
  ObjectiveParams params;
  params.beta = f.beta;
  params.heuristic = f.heuristic;
  std::optional<SubsetMask> w;
  if (!f.W.empty())
  {
    w = parse_coordinates(f.W, chain.dimension(), "--W");
    params.fixed_set = w;
  }
  auto const obj = build_subset_objective(f.problem, chain, params);
  if (obj.heuristic)
  {
    std::cerr << "warning: " << f.problem << " runs without its guarantee (stationary law is not of product form)\n";
  }
  json oracle = {{"problem", f.problem}, {"algorithm", f.algorithm}, {"runs", json::array()}};
  std::vector<Row> rows;

  auto record = [&](std::size_t m, SubsetResult const &run, double seconds, bool certify) {
    double const direct = direct_value(f.problem, chain.P, chain.pi, run.chosen, w);
    check_drift(direct, obj.reported(run.chosen), m);
    rows.push_back({m, {run.chosen.label()}, direct, seconds});
    if (!f.oracle.empty())
    {
      json entry = {{"m", m},
                    {"chosen", run.chosen.label()},
                    {"value", direct},
                    {"trajectory", trajectory_json(run.trajectory)}};
      if (certify)
      {
        auto copy = run;
        attach_certificate(obj, copy, m);
        entry["certificate"] = certificate_json(*copy.certificate);
      }
      else
      {
        auto const constraint = f.algorithm == "local-search" ? Constraint::AtMost : obj.constraint;
        auto const opt = brute_force_opt(obj.f, obj.ground, m, constraint);
        entry["opt"] = {{"chosen", opt.argmax.label()}, {"value", obj.report_sign * opt.value}};
      }
      oracle["runs"].push_back(entry);
    }
  };

  if (f.algorithm == "local-search")
  {
    if (!(f.epsilon > 0.0))
    {
      throw InvalidArgument("--epsilon must be positive");
    }
    auto const start = Clock::now();
    auto const ls = local_search(obj.f, obj.ground, f.epsilon);
    SubsetResult run;
    run.chosen = ls.chosen;
    run.value = ls.value;
    record(ls.chosen.size(), run, seconds_since(start), false);
  }
  else
  {
    auto const max_m = std::min(obj.max_m, obj.ground.size());
    auto [lo, hi] = m_range(f, obj.min_m, max_m);
    std::optional<std::vector<std::size_t>> fixed_batches;
    if (f.algorithm == "batch" && f.batch_sizes != "ones" && f.batch_sizes != "pairs")
    {
      fixed_batches = batches_for(f.batch_sizes, 0);
      std::size_t total = 0;
      for (auto q : *fixed_batches)
      {
        total += q;
      }
      if (!f.m && !f.m_min && !f.m_max)
      {
        lo = hi = total;
      }
    }
    for (std::size_t m = lo; m <= hi; ++m)
    {
      obj.require_admissible(m);
      auto const start = Clock::now();
      SubsetResult run;
      bool certify = false;
      if (f.algorithm == "greedy")
      {
        run = greedy(obj, m);
      }
      else if (f.algorithm == "distorted")
      {
        run = distorted_greedy(obj, m);
        certify = true;
      }
      else if (f.algorithm == "batch")
      {
        auto const q = fixed_batches ? *fixed_batches : batches_for(f.batch_sizes, m);
        run = batch_greedy(obj.f, obj.ground, m, q);
      }
      else
      {
        throw InvalidArgument("--algorithm " + f.algorithm + " does not apply to subset problem " + f.problem);
      }
      record(m, run, seconds_since(start), certify);
    }
  }
  emit_csv(f, {"subset"}, rows);
  if (!f.oracle.empty())
  {
    write_oracle(f.oracle, oracle);
  }
  return 0;
}

int run_select_partition(SelectFlags const &f, Chain const &chain)
{
  if (f.algorithm != "gen-distorted")
  {
    throw InvalidArgument("partition problem " + f.problem + " needs --algorithm gen-distorted");
  }
  ObjectiveParams params;
  params.beta = f.beta;
  params.heuristic = f.heuristic;
  auto const v = parse_ceiling(f.V, chain.dimension());
  auto const obj = build_partition_objective(f.problem, chain, v, params);
  if (obj.heuristic)
  {
    std::cerr << "warning: " << f.problem << " runs without its guarantee (stationary law is not of product form)\n";
  }
  auto [lo, hi] = m_range(f, obj.min_m, obj.max_m);
  json oracle = {{"problem", f.problem}, {"algorithm", f.algorithm}, {"V", v.label()}, {"runs", json::array()}};
  std::vector<Row> rows;
  for (std::size_t m = lo; m <= hi; ++m)
  {
    obj.require_admissible(m);
    auto const start = Clock::now();
    auto run = generalized_distorted_greedy(obj, m);
    double const seconds = seconds_since(start);
    double const direct = direct_value(f.problem, chain.P, chain.pi, run.chosen, v);
    check_drift(direct, obj.reported(run.chosen), m);
    std::vector<std::string> labels;
    for (auto const &p : run.chosen.parts())
    {
      labels.push_back(p.label());
    }
    rows.push_back({m, labels, direct, seconds});
    if (!f.oracle.empty())
    {
      attach_certificate(obj, run, m);
      oracle["runs"].push_back({{"m", m},
                                {"chosen", run.chosen.label()},
                                {"value", direct},
                                {"trajectory", trajectory_json(run.trajectory)},
                                {"certificate", certificate_json(*run.certificate)}});
    }
  }
  std::vector<std::string> cols;
  for (std::size_t i = 0; i < v.k(); ++i)
  {
    cols.push_back("S" + std::to_string(i + 1));
  }
  emit_csv(f, cols, rows);
  if (!f.oracle.empty())
  {
    write_oracle(f.oracle, oracle);
  }
  return 0;
}

int run_select(SelectFlags const &f)
{
  auto const known = is_partition_problem(f.problem) ? partition_problem_ids() : subset_problem_ids();
  if (std::find(known.begin(), known.end(), f.problem) == known.end())
  {
    throw InvalidArgument("unknown --problem '" + f.problem + "'");
  }
  auto [p, pi] = load_model(f.model);
  Chain const chain(std::move(p), std::move(pi));
  return is_partition_problem(f.problem) ? run_select_partition(f, chain) : run_select_subset(f, chain);
}

/// SplitMix64: counter-based, one 64-bit state word.
struct SplitMix64
{
  std::uint64_t state;

  std::uint64_t next()
  {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

std::size_t sample_row(std::span<const double> row, SplitMix64 &rng)
{
  double u = rng.uniform();
  for (std::size_t y = 0; y < row.size(); ++y)
  {
    if (u < row[y])
    {
      return y;
    }
    u -= row[y];
  }
  for (std::size_t y = row.size(); y-- > 0;)
  {
    if (row[y] > 0.0)
    {
      return y;
    }
  }
  return 0;
}

double empirical_tv(std::vector<std::size_t> const &counts, Distribution const &pi, std::size_t total)
{
  double tv = 0.0;
  for (std::size_t x = 0; x < pi.size(); ++x)
  {
    tv += std::abs(static_cast<double>(counts[x]) / static_cast<double>(total) - pi[x]);
  }
  return 0.5 * tv;
}

struct McmcFlags
{
  ModelFlags model;
  std::size_t n_min{0};
  std::size_t n_max{30};
  std::size_t steps{10};
  std::optional<std::size_t> split;
  std::size_t samples{0};
  std::uint64_t seed{0};
  std::string out;
};

int run_mcmc(McmcFlags const &f)
{
  if (f.n_min > f.n_max)
  {
    throw InvalidArgument("empty n range");
  }
  auto [p, pi] = load_model(f.model);
  Chain const chain(p, pi);
  auto const d = chain.dimension();
  if (d < 2)
  {
    throw InvalidArgument("the leave-one-out study needs d >= 2");
  }
  auto const all = chain.all();

  std::vector<double> leave_one_out(d);
  std::size_t i_star = 0;
  for (std::size_t i = 0; i < d; ++i)
  {
    leave_one_out[i] = chain.H->stationarity(all.without(i));
    if (leave_one_out[i] < leave_one_out[i_star] - 1e-12)
    {
      i_star = i;
    }
  }
  std::size_t split = i_star;
  if (f.split)
  {
    if (*f.split == 0 || *f.split > d)
    {
      throw InvalidArgument("--split outside 1.." + std::to_string(d));
    }
    split = *f.split - 1;
  }

  std::ostringstream csv;
  csv << "i,n,tv1000\n";
  for (std::size_t i = 0; i < d; ++i)
  {
    auto const keep = all.without(i);
    auto const pk = project_keep_in(p, pi, keep);
    auto const pik = marginalize(pi, keep);
    auto power = matrix_power(pk, f.n_min);
    for (std::size_t n = f.n_min; n <= f.n_max; ++n)
    {
      if (n > f.n_min)
      {
        power = multiply(power, pk);
      }
      csv << i + 1 << "," << n << "," << format_value(1000.0 * worst_case_tv(power, pik)) << "\n";
    }
  }

  auto const rest = all.without(split);
  auto const single = all - rest;
  auto const p_rest = matrix_power(project_keep_in(p, pi, rest), f.steps);
  auto const p_single = matrix_power(project_keep_in(p, pi, single), f.steps);
  std::vector<Block> blocks{{rest, p_rest}, {single, p_single}};
  auto const factorized = tensor_blocks(p.space(), blocks);
  auto const p_steps = matrix_power(p, f.steps);
  double const tv_p = worst_case_tv(p_steps, pi);
  double const tv_f = worst_case_tv(factorized, pi);

  std::cout << "i_star," << i_star + 1 << "\n";
  std::cout << "split," << split + 1 << "\n";
  for (std::size_t i = 0; i < d; ++i)
  {
    std::cout << "stationarity_leave_out_" << i + 1 << "," << format_value(leave_one_out[i]) << "\n";
  }
  std::cout << "tv_P_n" << f.steps << "," << format_value(tv_p) << "\n";
  std::cout << "tv_factorized_n" << f.steps << "," << format_value(tv_f) << "\n";

  if (f.samples > 0)
  {
    SplitMix64 rng{f.seed};
    std::vector<std::size_t> counts_p(p.size(), 0);
    std::vector<std::size_t> counts_f(p.size(), 0);
    for (std::size_t r = 0; r < f.samples; ++r)
    {
      counts_p[sample_row(p_steps.row(0), rng)] += 1;
      counts_f[sample_row(factorized.row(0), rng)] += 1;
    }
    std::cout << "empirical_tv_P," << format_value(empirical_tv(counts_p, pi, f.samples)) << "\n";
    std::cout << "empirical_tv_factorized," << format_value(empirical_tv(counts_f, pi, f.samples)) << "\n";
  }

  if (f.out.empty())
  {
    std::cout << csv.str();
  }
  else
  {
    std::ofstream file(f.out);
    if (!file)
    {
      throw FormatError("cannot open '" + f.out + "' for writing");
    }
    file << csv.str();
  }
  return 0;
}

int run_validate(std::string const &path)
{
  auto loaded = load_chain(path);
  for (auto const &w : loaded.warnings)
  {
    std::cout << "warning," << w << "\n";
  }
  std::cout << "states," << loaded.P.size() << "\n";
  std::cout << "stationary," << (loaded.stationary_supplied ? "supplied" : "computed") << "\n";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", stationarity_residual(loaded.P, loaded.pi));
  std::cout << "residual," << buf << "\n";
  std::cout << "entropy_rate," << format_value(entropy_rate(loaded.P, loaded.pi)) << "\n";
  std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Subset and partition selection for multivariate Markov chains"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  SelectFlags sel;
  auto *select = app.add_subcommand("select", "optimize a catalog objective over coordinate subsets");
  add_model_flags(select, sel.model);
  select->add_option("--problem", sel.problem, "catalog id")->required();
  select->add_option("--algorithm", sel.algorithm, "greedy|distorted|gen-distorted|local-search|batch")
    ->check(CLI::IsMember({"greedy", "distorted", "gen-distorted", "local-search", "batch"}));
  select->add_option("--m", sel.m, "single cardinality");
  select->add_option("--m-min", sel.m_min, "smallest cardinality");
  select->add_option("--m-max", sel.m_max, "largest cardinality");
  select->add_option("--V", sel.V, "ceiling partition, e.g. 1,2,3,4|5,6,7|8,9,10");
  select->add_option("--W", sel.W, "fixed coordinate set, e.g. 1,2,3");
  select->add_option("--beta", sel.beta, "override of the constant in the modular cost");
  select->add_option("--epsilon", sel.epsilon, "local search improvement parameter");
  select->add_option("--batch-sizes", sel.batch_sizes, "ones, pairs, or a comma list");
  select->add_flag("--heuristic", sel.heuristic, "allow product-form objectives on other chains");
  select->add_option("--oracle", sel.oracle, "JSON sidecar with trajectories and certificates");
  select->add_option("--seed", sel.seed, "accepted for symmetry with mcmc");
  select->add_option("--out", sel.out, "CSV path (default stdout)");
  select->add_option("--svg", sel.svg, "optional SVG line chart");
  select->add_flag("--timing", sel.timing, "append a wall-time column");

  McmcFlags mc;
  mc.model.d = 8;
  auto *mcmc = app.add_subcommand("mcmc", "leave-one-out mixing study and factorized sampler");
  add_model_flags(mcmc, mc.model);
  mcmc->add_option("--n-min", mc.n_min, "first step count of the curves");
  mcmc->add_option("--n-max", mc.n_max, "last step count of the curves");
  mcmc->add_option("--steps", mc.steps, "step count of the worst-case TV comparison");
  mcmc->add_option("--split", mc.split, "coordinate split off in the factorized kernel (default i*)");
  mcmc->add_option("--samples", mc.samples, "empirical comparison sample count (0 = off)");
  mcmc->add_option("--seed", mc.seed, "PRNG seed");
  mcmc->add_option("--out", mc.out, "CSV path for the curves (default stdout)");

  std::string validate_path;
  auto *validate_cmd = app.add_subcommand("validate", "check a chain file");
  validate_cmd->add_option("chain", validate_path, "chain JSON file")->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::CallForHelp const &e)
  {
    return app.exit(e);
  }
  catch (CLI::ParseError const &e)
  {
    app.exit(e);
    return kExitFlags;
  }

  try
  {
    if (select->parsed())
    {
      return run_select(sel);
    }
    if (mcmc->parsed())
    {
      return run_mcmc(mc);
    }
    return run_validate(validate_path);
  }
  catch (GuardError const &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGuard;
  }
  catch (InvalidArgument const &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFlags;
  }
  catch (std::exception const &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModel;
  }
}
