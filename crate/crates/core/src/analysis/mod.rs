//! Peak detection, half-maximum widths and iso-contours on absorption maps.

mod contour;
mod fwhm;
mod peaks;

use serde::Serialize;

pub use contour::{contour_polylines, ContourSet, Polyline};
pub use fwhm::fwhm_diameters;
pub use peaks::{find_peaks, Peak};

use crate::absorption::AbsorptionMap;

/// Peaks below this fraction of the map's largest |χ″| are ignored.
pub const DEFAULT_PROMINENCE_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizedPeak {
    pub peak: Peak,
    pub fwhm_x: Option<f64>,
    pub fwhm_y: Option<f64>,
    /// max(fwhm_x, fwhm_y), when both are defined.
    pub diameter: Option<f64>,
    pub within_half_wavelength: bool,
    pub fwhm_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakReport {
    pub peak_count: usize,
    pub half_wavelength: f64,
    pub peaks: Vec<LocalizedPeak>,
}

pub fn localization_report(map: &AbsorptionMap, min_prominence: f64) -> PeakReport {
    let half_wavelength = map.wave.half_wavelength();
    let peaks: Vec<LocalizedPeak> = find_peaks(map, min_prominence)
        .into_iter()
        .map(|peak| match fwhm_diameters(map, &peak) {
            Ok((wx, wy)) => {
                let d = wx.max(wy);
                LocalizedPeak {
                    peak,
                    fwhm_x: Some(wx),
                    fwhm_y: Some(wy),
                    diameter: Some(d),
                    within_half_wavelength: d < half_wavelength,
                    fwhm_error: None,
                }
            }
            Err(e) => LocalizedPeak {
                peak,
                fwhm_x: None,
                fwhm_y: None,
                diameter: None,
                within_half_wavelength: false,
                fwhm_error: Some(e.to_string()),
            },
        })
        .collect();
    PeakReport {
        peak_count: peaks.len(),
        half_wavelength,
        peaks,
    }
}
