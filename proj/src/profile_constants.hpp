#pragma once

// Calibration constants for the built-in behavioural profiles and the desk
// fixture geometry. Every number the default profiles depend on lives here.
//
// The profiles are deliberately coarse: commuters ride on weekdays with
// morning/evening peaks and short trips; recreational riders cluster on
// weekends and mid-afternoon with much longer trips; the dockless profiles
// sit between the two. Only sign/ordering statements are asserted against
// them, never exact shares.

#include <array>

namespace mobility::profile_constants {

// Generated trips fall in this civil date window (inclusive).
inline constexpr int kWindowStartYear = 2018, kWindowStartMonth = 3, kWindowStartDay = 1;
inline constexpr int kWindowEndYear = 2018, kWindowEndMonth = 5, kWindowEndDay = 31;

// Day-of-week weights, Monday..Sunday (normalised at load).
inline constexpr std::array<double, 7> kCommuterDays = {.16, .17, .17, .18, .16, .085, .075};
inline constexpr std::array<double, 7> kRecreationalDays = {.09, .09, .10, .11, .13, .26, .22};
inline constexpr std::array<double, 7> kDocklessBikeDays = {.11, .115, .13, .15, .15, .18, .165};
inline constexpr std::array<double, 7> kScooterDays = {.13, .14, .15, .17, .15, .14, .12};

// Hour-of-day start weights (normalised at load).
// Commuter weekdays: peaks at 8 and 17 plus a smaller midday bump at 12.
inline constexpr std::array<double, 24> kCommuterWeekdayHours = {
    .004, .002, .002, .002, .004, .010, .030, .065, .120, .055, .035, .040,
    .075, .050, .045, .050, .070, .115, .080, .050, .035, .025, .020, .016};
// Commuter weekends: single midday peak.
inline constexpr std::array<double, 24> kCommuterWeekendHours = {
    .006, .004, .003, .003, .004, .006, .012, .022, .040, .062, .085, .100,
    .105, .095, .085, .075, .065, .058, .050, .040, .032, .022, .015, .011};
// Recreational weekdays: no morning peak, gradual climb to 17 then a drop.
inline constexpr std::array<double, 24> kRecreationalWeekdayHours = {
    .008, .005, .004, .003, .003, .005, .012, .020, .030, .040, .052, .062,
    .072, .080, .088, .094, .100, .105, .075, .050, .035, .025, .018, .014};
// Recreational weekends: afternoon peak at 15, bulk between 10 and 18.
inline constexpr std::array<double, 24> kRecreationalWeekendHours = {
    .006, .004, .003, .003, .003, .004, .008, .014, .028, .050, .080, .095,
    .100, .105, .110, .115, .095, .070, .040, .025, .018, .011, .008, .005};
// Dockless bike weekdays: widened peaks 8-10 and 17-19, midday bump.
inline constexpr std::array<double, 24> kDocklessBikeWeekdayHours = {
    .005, .003, .003, .003, .004, .008, .020, .045, .085, .070, .055, .045,
    .070, .050, .045, .050, .060, .095, .080, .060, .045, .035, .035, .029};
inline constexpr std::array<double, 24> kDocklessBikeWeekendHours = {
    .006, .004, .003, .003, .004, .006, .010, .018, .032, .055, .080, .090,
    .095, .100, .105, .110, .090, .070, .045, .028, .018, .012, .009, .007};
// Scooter weekdays: morning 8-9, afternoon plateau 12-17 peaking at 15.
inline constexpr std::array<double, 24> kScooterWeekdayHours = {
    .003, .002, .002, .002, .003, .006, .018, .045, .085, .060, .050, .055,
    .080, .082, .085, .090, .085, .080, .065, .040, .025, .016, .011, .010};
inline constexpr std::array<double, 24> kScooterWeekendHours = {
    .004, .003, .002, .002, .003, .005, .009, .016, .030, .055, .085, .095,
    .100, .110, .105, .100, .088, .068, .045, .028, .020, .013, .008, .006};

// Log-normal duration models (median minutes, log-scale sigma).
inline constexpr double kCommuterMedianMin = 10.0, kCommuterSigma = 0.55;
inline constexpr double kRecreationalMedianMin = 23.0, kRecreationalSigma = 0.60;
inline constexpr double kDocklessBikeMedianMin = 10.0, kDocklessBikeSigma = 0.65;
inline constexpr double kScooterMedianMin = 10.0, kScooterSigma = 0.60;

// Spatial mixes. "Central" cells are the nearest eighth of stations to the
// station centroid (a downtown stand-in), the "core" is the nearest
// sixteenth, and "outer" cells are the farthest half (residential stand-in).
inline constexpr double kCentralCellFraction = 1.0 / 8.0;
inline constexpr double kCoreCellFraction = 1.0 / 16.0;
inline constexpr double kOuterCellFraction = 1.0 / 2.0;

// Commuter mornings run outer -> central; afternoons reverse.
inline constexpr double kCommuterHomeEndMass = 0.85;   // on outer cells
inline constexpr double kCommuterWorkEndMass = 0.80;   // on central cells
// Recreational trips hover around the core in both directions all day.
inline constexpr double kRecreationalStartMass = 0.85; // on core cells
inline constexpr double kRecreationalEndMass = 0.70;   // on core cells
// Dockless bikes: downtown-leaning everywhere.
inline constexpr double kDocklessBikeCentralMass = 0.50;
// Scooters: morning starts in the mid-distance ring, ends downtown.
inline constexpr double kScooterRingStartMass = 0.60;
inline constexpr double kScooterCentralEndMass = 0.50;

// Endpoint jitter: uniform within this radius of the cell's station.
inline constexpr double kJitterRadiusM = 200.0;

// Desk fixture geometry (roughly city-sized).
inline constexpr double kFixtureMinLat = 38.83, kFixtureMaxLat = 38.97;
inline constexpr double kFixtureMinLon = -77.08, kFixtureMaxLon = -76.93;
inline constexpr double kFixtureBoundaryPadDeg = 0.004;
inline constexpr double kFixtureJitterFraction = 0.2; // of the station grid step

} // namespace mobility::profile_constants
