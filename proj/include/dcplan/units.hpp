#pragma once

// Decimal SI units throughout: 1 GB = 1e9 bytes, 1 Gbps = 1e9 bit/s.
// Quantities are plain doubles in base units (bytes, bytes/s, seconds, W,
// FLOP, USD); the helpers below only exist to make call sites readable.

namespace dcplan::units {

inline constexpr double kilo = 1e3;
inline constexpr double mega = 1e6;
inline constexpr double giga = 1e9;
inline constexpr double tera = 1e12;
inline constexpr double peta = 1e15;

inline constexpr double bits_per_byte = 8.0;

constexpr double bps_to_bytes_per_s(double bits_per_second) { return bits_per_second / bits_per_byte; }
constexpr double bytes_per_s_to_bps(double bytes_per_second) { return bytes_per_second * bits_per_byte; }

constexpr double gbps(double v) { return v * giga; }
constexpr double tbps(double v) { return v * tera; }
constexpr double gb(double v) { return v * giga; }
constexpr double tb(double v) { return v * tera; }
constexpr double ms(double v) { return v * 1e-3; }

constexpr double to_ms(double seconds) { return seconds * 1e3; }
constexpr double to_gb(double bytes) { return bytes / giga; }
constexpr double to_tb(double bytes) { return bytes / tera; }

}  // namespace dcplan::units
