// Copyright 2026 The voicemark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "voicemark/attacks.hpp"
#include "voicemark/mcadams.hpp"
#include "voicemark/metrics.hpp"
#include "voicemark/version.hpp"
#include "voicemark_app/app.hpp"

namespace voicemark::app {

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "undefined"; }

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "voicemark: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code(e.kind());
  }
}

std::vector<CarrierPair> carriers_for(const std::vector<NamedAudio>& corpus,
                                      const watermark::WatermarkConfig& cfg,
                                      std::ostream* progress) {
  std::vector<CarrierPair> out;
  out.reserve(corpus.size());
  for (const auto& item : corpus) {
    if (progress) *progress << "voicemark: anonymizing " << item.name << '\n';
    out.push_back(make_carriers(item.audio, cfg));
  }
  return out;
}

}  // namespace

CarrierPair make_carriers(const AudioBuffer& audio, const watermark::WatermarkConfig& config) {
  return {watermark::bit_stream_carrier(audio, config.alpha0, config),
          watermark::bit_stream_carrier(audio, config.alpha1, config)};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t utterance, std::uint64_t payload,
                          std::uint64_t stream) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ utterance);
  h = splitmix64(h ^ payload);
  return splitmix64(h ^ stream);
}

CorpusCalibration calibrate_carriers(const std::vector<CarrierPair>& carriers,
                                     const watermark::WatermarkConfig& base, bool search,
                                     std::uint64_t seed) {
  if (carriers.empty()) throw Error(ErrorKind::kInvalidArgument, "calibration corpus is empty");
  base.validate();
  std::vector<double> stat0, stat1;
  std::vector<dsp::PowerSpectrum> spec0, spec1;
  for (std::size_t u = 0; u < carriers.size(); ++u) {
    const auto& pair = carriers[u];
    const std::size_t n = base.capacity(pair.c0);
    if (n == 0) continue;
    const auto bits = watermark::random_bits(n, derive_seed(seed, u, base.payload_bps, 0));
    const auto marked = watermark::embed_from_carriers(pair.c0, pair.c1, bits, base);
    if (search) {
      auto spectra = watermark::frame_spectra(marked, base, n);
      for (std::size_t k = 0; k < n; ++k) (bits[k] ? spec1 : spec0).push_back(std::move(spectra[k]));
    } else {
      const auto stats = watermark::frame_statistics(marked, base, n);
      for (std::size_t k = 0; k < n; ++k) (bits[k] ? stat1 : stat0).push_back(stats[k]);
    }
  }
  CorpusCalibration result;
  result.config = base;
  if (search) {
    if (spec0.empty() || spec1.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "calibration corpus too short for both bit values");
    }
    const auto edges = watermark::default_band_edges();
    std::vector<double> usable;
    for (double e : edges) {
      if (e >= base.bpf.low_hz && e <= base.bpf.high_hz) usable.push_back(e);
    }
    const auto found = watermark::search_bands(spec0, spec1, usable);
    result.config.band = found.band;
    result.config.reference = found.reference;
    result.calibration = found.calibration;
    result.frames0 = spec0.size();
    result.frames1 = spec1.size();
  } else {
    if (stat0.empty() || stat1.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "calibration corpus too short for both bit values");
    }
    result.calibration = watermark::calibrate_threshold(stat0, stat1);
    result.frames0 = stat0.size();
    result.frames1 = stat1.size();
  }
  result.config.theta = result.calibration.theta;
  return result;
}

int cmd_calibrate(const CalibrateOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto cfg = opt.config_file ? watermark::load_config(opt.config_file->string())
                               : watermark::WatermarkConfig{};
    cfg.payload_bps = opt.payload_bps;
    if (opt.band) cfg.band = *opt.band;
    if (opt.reference) cfg.reference = *opt.reference;
    // theta is what we are solving for; keep validate() happy meanwhile.
    cfg.theta = watermark::WatermarkConfig::default_theta(cfg.payload_bps).value_or(0.5);
    cfg.validate();
    const auto corpus = load_corpus(opt.corpus_dir);
    const auto carriers = carriers_for(corpus, cfg, nullptr);
    const auto cal = calibrate_carriers(carriers, cfg, opt.search_bands, opt.seed);
    if (!(cal.config.theta > 0.0 && cal.config.theta < 1.0)) {
      throw Error(ErrorKind::kNumerical, "calibrated threshold " + fmt(cal.config.theta) +
                                             " falls outside (0, 1)");
    }
    if (!cal.calibration.separable) {
      err << "voicemark: warning: bit classes overlap (balanced error "
          << fmt(cal.calibration.balanced_error) << "); theta is the error-minimizing cut\n";
    }
    watermark::save_config(cal.config, opt.output);
    out << "files = " << corpus.size() << '\n'
        << "frames = " << cal.frames0 << " + " << cal.frames1 << '\n'
        << "band = " << fmt(cal.config.band.low_hz) << ':' << fmt(cal.config.band.high_hz) << '\n'
        << "reference = " << fmt(cal.config.reference_band().low_hz) << ':'
        << fmt(cal.config.reference_band().high_hz) << '\n'
        << "theta = " << fmt(cal.config.theta) << '\n'
        << "balanced_error = " << fmt(cal.calibration.balanced_error) << '\n'
        << "separable = " << (cal.calibration.separable ? "yes" : "no") << '\n';
    return kExitOk;
  });
}

const Aggregate* RunReport::find(int payload_bps, const std::string& attack) const {
  for (const auto& a : aggregates) {
    if (a.payload_bps == payload_bps && a.attack == attack) return &a;
  }
  return nullptr;
}

std::vector<Aggregate> aggregate(const std::vector<Record>& records,
                                 const std::vector<int>& payloads,
                                 const std::vector<std::string>& attacks) {
  std::vector<Aggregate> out;
  for (int p : payloads) {
    for (const auto& name : attacks) {
      Aggregate agg{.payload_bps = p, .attack = name};
      double ber = 0.0;
      double sums[4] = {0, 0, 0, 0};
      std::size_t counts[4] = {0, 0, 0, 0};
      for (const auto& r : records) {
        if (r.skipped || r.payload_bps != p || r.attack != name) continue;
        ++agg.records;
        ber += r.ber;
        const std::optional<double>* rates[4] = {&r.far, &r.frr, &r.f1, &r.macro_f1};
        for (int i = 0; i < 4; ++i) {
          if (*rates[i]) {
            sums[i] += **rates[i];
            ++counts[i];
          }
        }
      }
      if (agg.records == 0) continue;
      agg.ber = ber / static_cast<double>(agg.records);
      std::optional<double>* dst[4] = {&agg.far, &agg.frr, &agg.f1, &agg.macro_f1};
      for (int i = 0; i < 4; ++i) {
        if (counts[i]) *dst[i] = sums[i] / static_cast<double>(counts[i]);
      }
      out.push_back(agg);
    }
  }
  return out;
}

RunReport evaluate(const std::vector<NamedAudio>& corpus, const EvaluateSettings& settings,
                   std::ostream* progress) {
  if (corpus.empty()) throw Error(ErrorKind::kInvalidArgument, "evaluation corpus is empty");
  RunReport report;
  report.version = std::string(voicemark::version());
  report.seed = settings.seed;
  report.payloads = settings.payloads;
  report.attacks = settings.attacks.empty() ? attacks::standard_attack_names() : settings.attacks;
  report.theta_source = settings.theta_source;
  for (const auto& item : corpus) report.files.push_back(item.name);

  for (int p : report.payloads) {
    auto it = settings.configs.find(p);
    watermark::WatermarkConfig cfg;
    if (it != settings.configs.end()) {
      cfg = it->second;
    } else {
      cfg = settings.base;
      cfg.payload_bps = p;
      const auto theta = watermark::WatermarkConfig::default_theta(p);
      if (!theta) {
        throw Error(ErrorKind::kInvalidArgument,
                    "no default threshold for " + std::to_string(p) + " bps; calibrate first");
      }
      cfg.theta = *theta;
    }
    cfg.validate();
    report.configs[p] = cfg;
  }

  std::vector<attacks::AttackSpec> specs;
  std::vector<bool> available;
  for (const auto& name : report.attacks) {
    specs.push_back(attacks::AttackSpec::named(name));
    const bool ok = specs.back().kind != attacks::AttackKind::kExternalCodec ||
                    attacks::command_available(specs.back().command);
    available.push_back(ok);
    if (!ok) report.skipped.push_back(name);
  }

  for (std::size_t u = 0; u < corpus.size(); ++u) {
    if (progress) *progress << "voicemark: evaluating " << corpus[u].name << '\n';
    // Carriers only depend on alphas, band-pass and level.
    std::map<std::string, CarrierPair> carrier_cache;
    for (int p : report.payloads) {
      const auto& cfg = report.configs.at(p);
      const std::string key = fmt(cfg.alpha0) + '/' + fmt(cfg.alpha1) + '/' + fmt(cfg.bpf.low_hz) +
                              '/' + fmt(cfg.bpf.high_hz) + '/' + fmt(cfg.target_dbfs);
      auto cached = carrier_cache.find(key);
      if (cached == carrier_cache.end()) {
        cached = carrier_cache.emplace(key, make_carriers(corpus[u].audio, cfg)).first;
      }
      const auto& pair = cached->second;
      const std::size_t n = cfg.capacity(corpus[u].audio);
      const auto bits =
          watermark::random_bits(n, derive_seed(settings.seed, u, static_cast<std::uint64_t>(p), 0));
      const auto marked = watermark::embed_from_carriers(pair.c0, pair.c1, bits, cfg);

      for (std::size_t a = 0; a < specs.size(); ++a) {
        Record rec{.file = corpus[u].name, .payload_bps = p, .attack = report.attacks[a]};
        rec.bits = n;
        if (!available[a] || n == 0) {
          rec.skipped = true;
          report.records.push_back(rec);
          continue;
        }
        auto spec = specs[a];
        spec.seed = derive_seed(settings.seed, u, static_cast<std::uint64_t>(p), 1 + a);
        AudioBuffer attacked;
        try {
          attacked = attacks::apply_attack(marked, spec);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kUnavailable) throw;
          rec.skipped = true;
          if (std::find(report.skipped.begin(), report.skipped.end(), rec.attack) ==
              report.skipped.end()) {
            report.skipped.push_back(rec.attack);
          }
          report.records.push_back(rec);
          continue;
        }
        const auto det = watermark::detect(attacked, cfg, n);
        const auto counts = metrics::confusion(bits, det.bits);
        const auto rates = metrics::rates(counts);
        rec.ber = metrics::ber(bits, det.bits);
        rec.far = rates.far;
        rec.frr = rates.frr;
        rec.f1 = rates.f1;
        rec.macro_f1 = metrics::macro_f1(counts);
        const auto [lo, hi] = std::minmax_element(det.statistics.begin(), det.statistics.end());
        rec.stat_min = *lo;
        rec.stat_max = *hi;
        double sum = 0.0;
        for (double s : det.statistics) sum += s;
        rec.stat_mean = sum / static_cast<double>(n);
        report.records.push_back(rec);
      }
    }
  }

  // Sorted by file, then payload/attack in run order; stable for equal names.
  auto order = [&](const Record& r) {
    const auto p = std::find(report.payloads.begin(), report.payloads.end(), r.payload_bps);
    const auto a = std::find(report.attacks.begin(), report.attacks.end(), r.attack);
    return std::make_tuple(r.file, p - report.payloads.begin(), a - report.attacks.begin());
  };
  std::stable_sort(report.records.begin(), report.records.end(),
                   [&](const Record& x, const Record& y) { return order(x) < order(y); });
  report.aggregates = aggregate(report.records, report.payloads, report.attacks);
  return report;
}

std::string RunReport::to_text() const {
  std::ostringstream out;
  out << "# voicemark evaluation report\n";
  out << "[run]\n";
  out << "tool = voicemark\n";
  out << "version = " << version << '\n';
  out << "prng = mt19937_64\n";
  out << "seed = " << seed << '\n';
  out << "seed_rule = splitmix64 chain over (seed, utterance index, payload_bps, stream); "
         "stream 0 = payload bits, 1 + attack index = attack noise\n";
  out << "bit_rule = top bit of each mt19937_64 draw\n";
  out << "theta_source = " << theta_source << '\n';
  out << "lpc_order = 20\nsubframe_ms = 20\nhop_ms = 10\nbpf_taps = " << dsp::kDefaultBandpassTaps
      << '\n';
  out << "payloads =";
  for (int p : payloads) out << ' ' << p;
  out << "\nattacks =";
  for (const auto& a : attacks) out << ' ' << a;
  out << '\n';

  out << "[attacks]\n";
  for (const auto& name : attacks) {
    const auto spec = attacks::AttackSpec::named(name);
    out << "attack." << name << " = ";
    switch (spec.kind) {
      case attacks::AttackKind::kNormal: out << "kind=normal"; break;
      case attacks::AttackKind::kAwgn: out << "kind=awgn snr_db=" << fmt(spec.snr_db); break;
      case attacks::AttackKind::kResample:
        out << "kind=resample intermediate_fs=" << spec.intermediate_fs;
        break;
      case attacks::AttackKind::kRequantize: out << "kind=requantize bits=" << spec.bits; break;
      case attacks::AttackKind::kExternalCodec: out << "kind=external command=" << spec.command; break;
    }
    out << '\n';
  }

  for (const auto& [p, cfg] : configs) {
    out << "[config." << p << "]\n";
    std::istringstream lines(watermark::format_config(cfg));
    std::string line;
    while (std::getline(lines, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      out << line.substr(0, eq) << " = " << line.substr(eq + 1) << '\n';
    }
  }

  out << "[corpus]\n";
  out << "files = " << files.size() << '\n';
  for (std::size_t i = 0; i < files.size(); ++i) out << "file." << i << " = " << files[i] << '\n';

  out << "[records]\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out << "record." << i << " = file=" << r.file << " payload_bps=" << r.payload_bps
        << " attack=" << r.attack;
    if (r.skipped) {
      out << " status=skipped\n";
      continue;
    }
    out << " status=ok bits=" << r.bits << " ber=" << fmt(r.ber) << " far=" << fmt(r.far)
        << " frr=" << fmt(r.frr) << " f1=" << fmt(r.f1) << " macro_f1=" << fmt(r.macro_f1)
        << " stat_mean=" << fmt(r.stat_mean) << " stat_min=" << fmt(r.stat_min)
        << " stat_max=" << fmt(r.stat_max) << '\n';
  }

  out << "[aggregate]\n";
  for (const auto& a : aggregates) {
    out << "mean." << a.payload_bps << '.' << a.attack << " = records=" << a.records
        << " ber=" << fmt(a.ber) << " far=" << fmt(a.far) << " frr=" << fmt(a.frr)
        << " f1=" << fmt(a.f1) << " macro_f1=" << fmt(a.macro_f1) << '\n';
  }

  out << "[skipped]\n";
  for (std::size_t i = 0; i < skipped.size(); ++i) out << "attack." << i << " = " << skipped[i] << '\n';
  return out.str();
}

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.payloads.empty()) throw Error(ErrorKind::kInvalidArgument, "no payloads given");
    EvaluateSettings settings;
    settings.payloads = opt.payloads;
    settings.attacks = opt.attacks;
    settings.seed = opt.seed;
    std::ostream* progress = opt.verbose ? &err : nullptr;
    if (opt.config_file) {
      settings.base = watermark::load_config(*opt.config_file);
      settings.theta_source = "config";
      // A config's theta belongs to its own payload only.
      if (std::find(opt.payloads.begin(), opt.payloads.end(), settings.base.payload_bps) !=
          opt.payloads.end()) {
        settings.configs[settings.base.payload_bps] = settings.base;
      }
    }
    if (opt.calibration_dir) {
      const auto cal_corpus = load_corpus(*opt.calibration_dir);
      auto cfg = settings.base;
      cfg.theta = 0.5;
      cfg.payload_bps = opt.payloads.front();
      const auto carriers = carriers_for(cal_corpus, cfg, progress);
      for (int p : opt.payloads) {
        cfg.payload_bps = p;
        const auto cal = calibrate_carriers(carriers, cfg, opt.search_bands, opt.seed);
        settings.configs[p] = cal.config;
        if (progress) {
          *progress << "voicemark: calibrated " << p << " bps: theta " << fmt(cal.config.theta)
                    << ", balanced error " << fmt(cal.calibration.balanced_error) << '\n';
        }
      }
      settings.theta_source = std::string(opt.search_bands ? "calibrated+bands" : "calibrated") +
                              " on " + std::to_string(cal_corpus.size()) + " files";
    }
    const auto corpus = load_corpus(opt.corpus_dir);
    const auto report = evaluate(corpus, settings, progress);
    {
      std::ofstream file(opt.report_file, std::ios::binary);
      file << report.to_text();
      if (!file) throw Error(ErrorKind::kIo, "cannot write " + opt.report_file.string());
    }
    out << "payload attack records mean_ber\n";
    for (const auto& a : report.aggregates) {
      out << a.payload_bps << ' ' << a.attack << ' ' << a.records << ' ' << fmt(a.ber) << '\n';
    }
    for (const auto& name : report.skipped) {
      err << "voicemark: warning: attack '" << name << "' skipped (codec unavailable)\n";
    }
    if (opt.require_codecs && !report.skipped.empty()) return kExitUnavailable;
    return kExitOk;
  });
}

}  // namespace voicemark::app
