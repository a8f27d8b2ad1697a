#include "nseg/augment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cctype>

#include "nseg/error.hpp"
#include "nseg/parallel.hpp"

namespace nseg {

namespace {

// Fork tags for the companion transforms. The deformation itself uses the
// sample stream directly.
constexpr std::uint64_t kFlipStream = 1;
constexpr std::uint64_t kResizeStream = 2;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  for (;;) {
    const auto pos = s.find(sep);
    parts.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return parts;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<double> parse_number_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  for (std::string_view part : split(text, ',')) {
    const auto v = to_double(part);
    if (!v) {
      throw InvalidParameter("omega: cannot parse " + std::string(what) + " value '" +
                             std::string(part) + "'");
    }
    out.push_back(*v);
  }
  return out;
}

double parse_probability(const std::string& key, const std::string& value) {
  const auto v = to_double(value);
  if (!v || !(*v >= 0.0 && *v <= 1.0)) {
    throw InvalidParameter(key + ": expected a probability in [0, 1], got '" + value + "'");
  }
  return *v;
}

}  // namespace

// ---------------------------------------------------------------------------
// OmegaSet

OmegaSet OmegaSet::defaults() { return parse("1,15,30,50,100x3,5,10"); }

OmegaSet OmegaSet::parse(std::string_view text) {
  text = trim(text);
  OmegaSet omega;
  if (text.find(':') != std::string_view::npos) {
    // Explicit pair list "a:s;a:s".
    for (std::string_view item : split(text, ';')) {
      const auto fields = split(item, ':');
      const auto a = fields.size() == 2 ? to_double(fields[0]) : std::nullopt;
      const auto s = fields.size() == 2 ? to_double(fields[1]) : std::nullopt;
      if (!a || !s) {
        throw InvalidParameter("omega: malformed pair '" + std::string(item) + "'");
      }
      omega.pairs.push_back({*a, *s});
    }
  } else {
    const auto x = text.find('x');
    if (x == std::string_view::npos || text.find('x', x + 1) != std::string_view::npos) {
      throw InvalidParameter("omega: expected 'alphas x sigmas', got '" + std::string(text) + "'");
    }
    const auto alphas = parse_number_list(text.substr(0, x), "alpha");
    const auto sigmas = parse_number_list(text.substr(x + 1), "sigma");
    for (double a : alphas) {
      for (double s : sigmas) omega.pairs.push_back({a, s});
    }
  }
  omega.validate();
  return omega;
}

void OmegaSet::validate() const {
  if (pairs.empty()) throw InvalidParameter("omega must contain at least one (alpha, sigma) pair");
  for (const auto& p : pairs) p.validate();
}

std::string format_omega(const OmegaSet& omega) {
  std::vector<double> alphas;
  std::vector<double> sigmas;
  for (const auto& p : omega.pairs) {
    if (std::find(alphas.begin(), alphas.end(), p.alpha) == alphas.end()) alphas.push_back(p.alpha);
    if (std::find(sigmas.begin(), sigmas.end(), p.sigma) == sigmas.end()) sigmas.push_back(p.sigma);
  }

  bool is_product = alphas.size() * sigmas.size() == omega.pairs.size();
  for (std::size_t i = 0; is_product && i < omega.pairs.size(); ++i) {
    const DeformationParams expected{alphas[i / sigmas.size()], sigmas[i % sigmas.size()]};
    is_product = omega.pairs[i] == expected;
  }

  std::string out;
  if (is_product) {
    for (std::size_t i = 0; i < alphas.size(); ++i) out += (i ? "," : "") + format_double(alphas[i]);
    out += 'x';
    for (std::size_t i = 0; i < sigmas.size(); ++i) out += (i ? "," : "") + format_double(sigmas[i]);
  } else {
    for (std::size_t i = 0; i < omega.pairs.size(); ++i) {
      out += (i ? ";" : "") + format_double(omega.pairs[i].alpha) + ":" +
             format_double(omega.pairs[i].sigma);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config

void AugmentConfig::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidParameter("p must be in [0, 1], got " + format_double(p));
  }
  if (!(hflip_p >= 0.0 && hflip_p <= 1.0)) {
    throw InvalidParameter("hflip-p must be in [0, 1], got " + format_double(hflip_p));
  }
  omega.validate();
  if (resize) {
    if (!(resize->lo > 0.0) || !(resize->lo <= resize->hi) || !std::isfinite(resize->hi)) {
      throw InvalidParameter("resize range must satisfy 0 < lo <= hi, got " +
                             format_double(resize->lo) + ":" + format_double(resize->hi));
    }
  }
}

std::string_view to_string(AugmentMode mode) {
  switch (mode) {
    case AugmentMode::label_only: return "label";
    case AugmentMode::image_only: return "image";
    case AugmentMode::identical: return "identical";
  }
  return "label";
}

AugmentMode parse_mode(std::string_view text) {
  text = trim(text);
  if (text == "label" || text == "label_only") return AugmentMode::label_only;
  if (text == "image" || text == "image_only") return AugmentMode::image_only;
  if (text == "identical") return AugmentMode::identical;
  throw InvalidParameter("mode: expected label, image or identical, got '" + std::string(text) + "'");
}

AugmentConfig config_from_mapping(const std::map<std::string, std::string>& mapping) {
  AugmentConfig config;
  for (const auto& [key, raw] : mapping) {
    const std::string value(trim(raw));
    if (key == "mode") {
      config.mode = parse_mode(value);
    } else if (key == "p") {
      config.p = parse_probability(key, value);
    } else if (key == "omega") {
      config.omega = OmegaSet::parse(value);
    } else if (key == "seed") {
      std::uint64_t seed = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
        throw InvalidParameter("seed: expected an unsigned 64-bit integer, got '" + value + "'");
      }
      config.master_seed = seed;
    } else if (key == "fill") {
      if (value == "ignore") config.warp.fill = HoleFill::ignore_label;
      else if (value == "nearest") config.warp.fill = HoleFill::nearest_source;
      else throw InvalidParameter("fill: expected ignore or nearest, got '" + value + "'");
    } else if (key == "mapping") {
      if (value == "forward") config.warp.mapping = Mapping::forward;
      else if (value == "backward") config.warp.mapping = Mapping::backward;
      else throw InvalidParameter("mapping: expected forward or backward, got '" + value + "'");
    } else if (key == "image-interp") {
      if (value == "nearest") config.warp.image_interp = Interpolation::nearest;
      else if (value == "bilinear") config.warp.image_interp = Interpolation::bilinear;
      else throw InvalidParameter("image-interp: expected nearest or bilinear, got '" + value + "'");
    } else if (key == "hflip-p") {
      config.hflip_p = parse_probability(key, value);
    } else if (key == "resize") {
      if (value.empty() || value == "none") {
        config.resize.reset();
      } else {
        const auto parts = split(value, ':');
        const auto lo = parts.size() == 2 ? to_double(parts[0]) : std::nullopt;
        const auto hi = parts.size() == 2 ? to_double(parts[1]) : std::nullopt;
        if (!lo || !hi) throw InvalidParameter("resize: expected lo:hi, got '" + value + "'");
        config.resize = ResizeRange{*lo, *hi};
      }
    } else {
      throw InvalidParameter("unknown configuration key '" + key + "'");
    }
  }
  config.validate();
  return config;
}

std::map<std::string, std::string> config_to_mapping(const AugmentConfig& config) {
  return {
      {"mode", std::string(to_string(config.mode))},
      {"p", format_double(config.p)},
      {"omega", format_omega(config.omega)},
      {"seed", std::to_string(config.master_seed)},
      {"fill", config.warp.fill == HoleFill::ignore_label ? "ignore" : "nearest"},
      {"mapping", config.warp.mapping == Mapping::forward ? "forward" : "backward"},
      {"image-interp",
       config.warp.image_interp == Interpolation::nearest ? "nearest" : "bilinear"},
      {"hflip-p", format_double(config.hflip_p)},
      {"resize", config.resize ? format_double(config.resize->lo) + ":" +
                                     format_double(config.resize->hi)
                               : "none"},
  };
}

// ---------------------------------------------------------------------------
// Augmentation

DeformationParams sample_params(const OmegaSet& omega, RandomStream& rng) {
  if (omega.pairs.empty()) throw InvalidParameter("cannot sample from an empty omega set");
  return omega.pairs[rng.index(omega.pairs.size())];
}

std::optional<DeformationParams> draw_deformation(const AugmentConfig& config,
                                                  RandomStream& rng) {
  const double u = rng.uniform();
  const DeformationParams params = sample_params(config.omega, rng);
  if (u > config.p) return std::nullopt;
  return params;
}

LabelMask nsegment(const LabelMask& mask, const AugmentConfig& config, RandomStream& rng,
                   AugmentTrace* trace) {
  config.validate();
  const auto params = draw_deformation(config, rng);
  if (trace) trace->deformed = params.has_value();
  if (!params) return mask;
  if (trace) trace->params = *params;

  DisplacementField field = generate_displacement_field(mask.width, mask.height, *params, rng);
  LabelMask out = warp_label(mask, field, config.warp);
  if (trace && trace->keep_fields) trace->mask_field = std::move(field);
  return out;
}

SamplePair apply_augmentation(const SamplePair& sample, const AugmentConfig& config,
                              RandomStream& rng, AugmentTrace* trace) {
  config.validate();
  if (sample.image.width != sample.mask.width || sample.image.height != sample.mask.height) {
    throw InvalidInput("image and mask dimensions differ");
  }

  SamplePair out = sample;
  const auto params = draw_deformation(config, rng);
  if (trace) {
    trace->deformed = params.has_value();
    if (params) trace->params = *params;
  }

  if (params) {
    const int w = sample.mask.width;
    const int h = sample.mask.height;
    const DisplacementField field = generate_displacement_field(w, h, *params, rng);
    const bool warp_mask = config.mode != AugmentMode::image_only;
    const bool warp_img = config.mode != AugmentMode::label_only;
    if (warp_mask) out.mask = warp_label(sample.mask, field, config.warp);
    if (warp_img) out.image = warp_image(sample.image, field, config.warp);
    if (trace && trace->keep_fields) {
      if (warp_mask) trace->mask_field = field;
      if (warp_img) trace->image_field = field;
    }
  }

  RandomStream flip_rng = rng.fork(kFlipStream);
  const bool flip = !(flip_rng.uniform() > config.hflip_p);
  if (flip) {
    out.image = flip_horizontal(out.image);
    out.mask = flip_horizontal(out.mask);
  }
  if (trace) trace->flipped = flip;

  if (config.resize) {
    RandomStream resize_rng = rng.fork(kResizeStream);
    const double scale =
        config.resize->lo + (config.resize->hi - config.resize->lo) * resize_rng.uniform();
    const int nw = std::max(1, static_cast<int>(std::round(out.mask.width * scale)));
    const int nh = std::max(1, static_cast<int>(std::round(out.mask.height * scale)));
    out.mask = resize_nearest(out.mask, nw, nh);
    out.image = resize_bilinear(out.image, nw, nh);
    if (trace) trace->scale = scale;
  }
  return out;
}

SamplePair augment_sample(const SamplePair& sample, const AugmentConfig& config,
                          AugmentTrace* trace) {
  RandomStream rng = derive_stream(config.master_seed, sample.sample_id, sample.epoch);
  return apply_augmentation(sample, config, rng, trace);
}

BatchResult augment_batch(std::span<const SamplePair> samples, const AugmentConfig& config,
                          int workers) {
  config.validate();
  BatchResult result;
  result.samples.resize(samples.size());
  result.traces.resize(samples.size());
  parallel_for(samples.size(), workers, [&](std::size_t i) {
    result.samples[i] = augment_sample(samples[i], config, &result.traces[i]);
  });
  return result;
}

}  // namespace nseg
