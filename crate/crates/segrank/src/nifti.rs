//! Minimal NIfTI-1 reader/writer for integer label volumes.
//!
//! Supports single-file `.nii` and gzip-compressed `.nii.gz` images with the
//! datatypes label maps actually use (uint8, int16, int32). Both byte orders
//! are read; files are always written little-endian. Header extensions are
//! skipped. Intensity scaling is rejected: a label map with `scl_slope`
//! outside {0, 1} or a nonzero `scl_inter` is corrupt by definition.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use byteorder::{BigEndian, ByteOrder, LittleEndian};
use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::error::{Error, Result};
use crate::volume::{Grid, LabelVolume};

const HEADER_SIZE: usize = 348;
const MAGIC: &[u8; 4] = b"n+1\0";

const DT_UINT8: i16 = 2;
const DT_INT16: i16 = 4;
const DT_INT32: i16 = 8;

/// Read a label volume from a `.nii` or `.nii.gz` file.
///
/// Gzip compression is detected from the file content, not the extension.
pub fn read_volume(path: &Path) -> Result<LabelVolume> {
    let raw = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bytes = if raw.len() >= 2 && raw[0] == 0x1f && raw[1] == 0x8b {
        let mut out = Vec::new();
        GzDecoder::new(&raw[..])
            .read_to_end(&mut out)
            .map_err(|e| Error::io(path, e))?;
        out
    } else {
        raw
    };
    parse(path, &bytes)
}

fn parse(path: &Path, bytes: &[u8]) -> Result<LabelVolume> {
    if bytes.len() < HEADER_SIZE {
        return Err(Error::nifti(path, "file shorter than the 348-byte header"));
    }
    let le_size = LittleEndian::read_i32(&bytes[0..4]);
    let be_size = BigEndian::read_i32(&bytes[0..4]);
    if le_size == HEADER_SIZE as i32 {
        parse_order::<LittleEndian>(path, bytes)
    } else if be_size == HEADER_SIZE as i32 {
        parse_order::<BigEndian>(path, bytes)
    } else {
        Err(Error::nifti(
            path,
            "sizeof_hdr is not 348 in either byte order",
        ))
    }
}

fn parse_order<E: ByteOrder>(path: &Path, bytes: &[u8]) -> Result<LabelVolume> {
    if &bytes[344..348] != MAGIC {
        return Err(Error::nifti(path, "magic is not \"n+1\" (single-file NIfTI-1)"));
    }

    let ndim = E::read_i16(&bytes[40..42]);
    if !(1..=7).contains(&ndim) {
        return Err(Error::nifti(path, format!("dim[0] = {ndim} out of range")));
    }
    let mut dim = [1i16; 7];
    for (i, d) in dim.iter_mut().enumerate() {
        *d = E::read_i16(&bytes[42 + 2 * i..44 + 2 * i]);
    }
    for (i, &d) in dim.iter().enumerate().take(ndim as usize) {
        if d < 1 {
            return Err(Error::nifti(path, format!("dim[{}] = {d} is not positive", i + 1)));
        }
    }
    if dim.iter().skip(3).take(ndim.saturating_sub(3) as usize).any(|&d| d > 1) {
        return Err(Error::nifti(path, "volume has more than three non-singleton dimensions"));
    }
    let dims = [
        dim[0] as usize,
        if ndim >= 2 { dim[1] as usize } else { 1 },
        if ndim >= 3 { dim[2] as usize } else { 1 },
    ];

    let datatype = E::read_i16(&bytes[70..72]);
    let bytes_per_voxel = match datatype {
        DT_UINT8 => 1,
        DT_INT16 => 2,
        DT_INT32 => 4,
        code => {
            return Err(Error::UnsupportedDatatype {
                path: path.to_path_buf(),
                code,
            })
        }
    };

    let mut spacing = [0f64; 3];
    for (i, s) in spacing.iter_mut().enumerate() {
        let p = E::read_f32(&bytes[76 + 4 * (i + 1)..80 + 4 * (i + 1)]);
        let p = f64::from(p.abs());
        if dims[i] > 1 && !(p.is_finite() && p > 0.0) {
            return Err(Error::nifti(path, format!("pixdim[{}] = {p} is not a positive spacing", i + 1)));
        }
        *s = if p > 0.0 && p.is_finite() { p } else { 1.0 };
    }

    let vox_offset = E::read_f32(&bytes[108..112]);
    if !vox_offset.is_finite() || vox_offset < HEADER_SIZE as f32 || vox_offset.fract() != 0.0 {
        return Err(Error::nifti(path, format!("vox_offset = {vox_offset} is invalid")));
    }
    let vox_offset = vox_offset as usize;

    let scl_slope = E::read_f32(&bytes[112..116]);
    let scl_inter = E::read_f32(&bytes[116..120]);
    if !(scl_slope == 0.0 || scl_slope == 1.0) || scl_inter != 0.0 {
        return Err(Error::nifti(
            path,
            format!("label map declares intensity scaling (scl_slope = {scl_slope}, scl_inter = {scl_inter})"),
        ));
    }

    let sform_code = E::read_i16(&bytes[254..256]);
    let affine = if sform_code > 0 {
        let mut rows = [[0f32; 4]; 3];
        for (r, row) in rows.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                let off = 280 + 16 * r + 4 * c;
                *v = E::read_f32(&bytes[off..off + 4]);
            }
        }
        Some(rows)
    } else {
        None
    };

    let grid = Grid::new(dims, spacing);
    let n = grid.len();
    let data_end = vox_offset + n * bytes_per_voxel;
    if bytes.len() < data_end {
        return Err(Error::nifti(
            path,
            format!("file ends at {} but voxel data needs {data_end} bytes", bytes.len()),
        ));
    }
    let data = &bytes[vox_offset..data_end];

    let mut labels = vec![0u16; n];
    match datatype {
        DT_UINT8 => {
            for (l, &b) in labels.iter_mut().zip(data.iter()) {
                *l = u16::from(b);
            }
        }
        DT_INT16 => {
            for (i, l) in labels.iter_mut().enumerate() {
                let v = E::read_i16(&data[2 * i..2 * i + 2]);
                if v < 0 {
                    return Err(Error::nifti(path, format!("negative label value {v}")));
                }
                *l = v as u16;
            }
        }
        DT_INT32 => {
            for (i, l) in labels.iter_mut().enumerate() {
                let v = E::read_i32(&data[4 * i..4 * i + 4]);
                if v < 0 {
                    return Err(Error::nifti(path, format!("negative label value {v}")));
                }
                if v > i32::from(u16::MAX) {
                    return Err(Error::nifti(path, format!("label value {v} exceeds 65535")));
                }
                *l = v as u16;
            }
        }
        _ => unreachable!(),
    }

    Ok(LabelVolume {
        grid,
        labels,
        scheme_id: String::new(),
        affine,
    })
}

/// Write a label volume as single-file NIfTI-1, little-endian.
///
/// The smallest datatype that holds every label is chosen (uint8, then
/// int16, then int32). A path ending in `.gz` is gzip-compressed with a
/// fixed header so identical volumes produce identical bytes.
pub fn write_volume(path: &Path, volume: &LabelVolume) -> Result<()> {
    let max_label = volume.labels.iter().copied().max().unwrap_or(0);
    let (datatype, bitpix): (i16, i16) = if max_label <= u16::from(u8::MAX) {
        (DT_UINT8, 8)
    } else if max_label <= i16::MAX as u16 {
        (DT_INT16, 16)
    } else {
        (DT_INT32, 32)
    };
    let bytes_per_voxel = (bitpix / 8) as usize;

    let n = volume.grid.len();
    assert_eq!(n, volume.labels.len(), "dims product must match voxel count");
    let vox_offset = 352usize;
    let mut out = vec![0u8; vox_offset + n * bytes_per_voxel];

    LittleEndian::write_i32(&mut out[0..4], HEADER_SIZE as i32);
    out[38] = b'r';
    LittleEndian::write_i16(&mut out[40..42], 3);
    for i in 0..3 {
        LittleEndian::write_i16(
            &mut out[42 + 2 * i..44 + 2 * i],
            i16::try_from(volume.grid.dims[i]).expect("dimension exceeds NIfTI-1 limit"),
        );
    }
    for i in 3..7 {
        LittleEndian::write_i16(&mut out[42 + 2 * i..44 + 2 * i], 1);
    }
    LittleEndian::write_i16(&mut out[70..72], datatype);
    LittleEndian::write_i16(&mut out[72..74], bitpix);
    LittleEndian::write_f32(&mut out[76..80], 1.0);
    for i in 0..3 {
        LittleEndian::write_f32(
            &mut out[80 + 4 * i..84 + 4 * i],
            volume.grid.spacing[i] as f32,
        );
    }
    for i in 4..8 {
        LittleEndian::write_f32(&mut out[76 + 4 * i..80 + 4 * i], 1.0);
    }
    LittleEndian::write_f32(&mut out[108..112], vox_offset as f32);
    LittleEndian::write_f32(&mut out[112..116], 1.0);
    LittleEndian::write_f32(&mut out[116..120], 0.0);
    out[123] = 2; // spatial units: millimetres

    let rows = volume.affine.unwrap_or_else(|| {
        let s = volume.grid.spacing;
        [
            [s[0] as f32, 0.0, 0.0, 0.0],
            [0.0, s[1] as f32, 0.0, 0.0],
            [0.0, 0.0, s[2] as f32, 0.0],
        ]
    });
    LittleEndian::write_i16(&mut out[254..256], 1);
    for (r, row) in rows.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            let off = 280 + 16 * r + 4 * c;
            LittleEndian::write_f32(&mut out[off..off + 4], v);
        }
    }
    out[344..348].copy_from_slice(MAGIC);
    // bytes 348..352 stay zero: no header extensions

    match datatype {
        DT_UINT8 => {
            for (i, &l) in volume.labels.iter().enumerate() {
                out[vox_offset + i] = l as u8;
            }
        }
        DT_INT16 => {
            for (i, &l) in volume.labels.iter().enumerate() {
                let off = vox_offset + 2 * i;
                LittleEndian::write_i16(&mut out[off..off + 2], l as i16);
            }
        }
        DT_INT32 => {
            for (i, &l) in volume.labels.iter().enumerate() {
                let off = vox_offset + 4 * i;
                LittleEndian::write_i32(&mut out[off..off + 4], i32::from(l));
            }
        }
        _ => unreachable!(),
    }

    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let is_gz = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"));
    if is_gz {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut enc = GzEncoder::new(file, Compression::default());
        enc.write_all(&out).map_err(|e| Error::io(path, e))?;
        enc.finish().map_err(|e| Error::io(path, e))?;
    } else {
        fs::write(path, &out).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use tempfile::tempdir;

    fn random_volume(seed: u64, max_label: u16) -> LabelVolume {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dims = [
            rng.random_range(1..=12usize),
            rng.random_range(1..=12usize),
            rng.random_range(1..=12usize),
        ];
        let spacing = [
            rng.random_range(0.25..=3.0f64),
            rng.random_range(0.25..=3.0f64),
            rng.random_range(0.25..=3.0f64),
        ];
        let grid = Grid::new(dims, spacing);
        let labels = (0..grid.len())
            .map(|_| rng.random_range(0..=max_label))
            .collect();
        LabelVolume::from_labels(grid, labels)
    }

    fn assert_same_voxels(a: &LabelVolume, b: &LabelVolume) {
        assert_eq!(a.grid.dims, b.grid.dims);
        for i in 0..3 {
            let (sa, sb) = (a.grid.spacing[i], b.grid.spacing[i]);
            assert!(
                (sa - sb).abs() <= 1e-6 * sa.max(sb),
                "spacing[{i}] {sa} vs {sb}"
            );
        }
        assert_eq!(a.labels, b.labels);
    }

    #[test]
    fn roundtrip_many_seeded_volumes() {
        let dir = tempdir().unwrap();
        for seed in 0..50u64 {
            let max_label = match seed % 3 {
                0 => 3,
                1 => 300,
                _ => 40_000,
            };
            let v = random_volume(seed, max_label);
            let plain = dir.path().join(format!("v{seed}.nii"));
            let gz = dir.path().join(format!("v{seed}.nii.gz"));
            write_volume(&plain, &v).unwrap();
            write_volume(&gz, &v).unwrap();
            assert_same_voxels(&read_volume(&plain).unwrap(), &v);
            assert_same_voxels(&read_volume(&gz).unwrap(), &v);
        }
    }

    #[test]
    fn datatype_tracks_label_range() {
        let dir = tempdir().unwrap();
        let grid = Grid::new([2, 2, 2], [1.0, 1.0, 1.0]);
        for (max, expected_len) in [(2u16, 352 + 8), (1000, 352 + 16), (40_000, 352 + 32)] {
            let mut v = LabelVolume::zeros(grid);
            v.labels[0] = max;
            let p = dir.path().join(format!("d{max}.nii"));
            write_volume(&p, &v).unwrap();
            assert_eq!(fs::read(&p).unwrap().len(), expected_len);
            assert_same_voxels(&read_volume(&p).unwrap(), &v);
        }
    }

    #[test]
    fn gzip_output_is_deterministic() {
        let dir = tempdir().unwrap();
        let v = random_volume(7, 3);
        let a = dir.path().join("a.nii.gz");
        let b = dir.path().join("b.nii.gz");
        write_volume(&a, &v).unwrap();
        write_volume(&b, &v).unwrap();
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }

    #[test]
    fn big_endian_files_are_read() {
        let dir = tempdir().unwrap();
        let v = random_volume(3, 200);
        let p = dir.path().join("be.nii");
        // hand-build a big-endian int16 file
        let n = v.grid.len();
        let mut out = vec![0u8; 352 + 2 * n];
        BigEndian::write_i32(&mut out[0..4], 348);
        BigEndian::write_i16(&mut out[40..42], 3);
        for i in 0..3 {
            BigEndian::write_i16(&mut out[42 + 2 * i..44 + 2 * i], v.grid.dims[i] as i16);
        }
        BigEndian::write_i16(&mut out[70..72], DT_INT16);
        BigEndian::write_i16(&mut out[72..74], 16);
        for i in 0..3 {
            BigEndian::write_f32(&mut out[80 + 4 * i..84 + 4 * i], v.grid.spacing[i] as f32);
        }
        BigEndian::write_f32(&mut out[108..112], 352.0);
        out[344..348].copy_from_slice(MAGIC);
        for (i, &l) in v.labels.iter().enumerate() {
            BigEndian::write_i16(&mut out[352 + 2 * i..354 + 2 * i], l as i16);
        }
        fs::write(&p, &out).unwrap();
        assert_same_voxels(&read_volume(&p).unwrap(), &v);
    }

    #[test]
    fn extensions_are_skipped() {
        let dir = tempdir().unwrap();
        let v = random_volume(11, 3);
        let p = dir.path().join("ext.nii");
        write_volume(&p, &v).unwrap();
        let mut bytes = fs::read(&p).unwrap();
        // splice in one 16-byte extension after the header
        let ext = {
            let mut e = vec![0u8; 16];
            LittleEndian::write_i32(&mut e[0..4], 16);
            LittleEndian::write_i32(&mut e[4..8], 40);
            e
        };
        bytes[348] = 1;
        let mut spliced = bytes[..352].to_vec();
        spliced.extend_from_slice(&ext);
        spliced.extend_from_slice(&bytes[352..]);
        LittleEndian::write_f32(&mut spliced[108..112], 368.0);
        fs::write(&p, &spliced).unwrap();
        assert_same_voxels(&read_volume(&p).unwrap(), &v);
    }

    #[test]
    fn intensity_scaling_is_rejected() {
        let dir = tempdir().unwrap();
        let v = random_volume(5, 3);
        let p = dir.path().join("scaled.nii");
        write_volume(&p, &v).unwrap();
        let mut bytes = fs::read(&p).unwrap();
        LittleEndian::write_f32(&mut bytes[112..116], 2.0);
        fs::write(&p, &bytes).unwrap();
        let err = read_volume(&p).unwrap_err();
        assert!(err.to_string().contains("intensity scaling"), "{err}");
    }

    #[test]
    fn negative_labels_are_rejected() {
        let dir = tempdir().unwrap();
        let v = random_volume(9, 1000);
        let p = dir.path().join("neg.nii");
        write_volume(&p, &v).unwrap();
        let mut bytes = fs::read(&p).unwrap();
        LittleEndian::write_i16(&mut bytes[352..354], -4);
        fs::write(&p, &bytes).unwrap();
        let err = read_volume(&p).unwrap_err();
        assert!(err.to_string().contains("negative label"), "{err}");
    }

    #[test]
    fn unsupported_datatype_is_reported_with_its_code() {
        let dir = tempdir().unwrap();
        let v = random_volume(2, 3);
        let p = dir.path().join("f32.nii");
        write_volume(&p, &v).unwrap();
        let mut bytes = fs::read(&p).unwrap();
        LittleEndian::write_i16(&mut bytes[70..72], 16); // float32
        fs::write(&p, &bytes).unwrap();
        match read_volume(&p).unwrap_err() {
            Error::UnsupportedDatatype { code, .. } => assert_eq!(code, 16),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn truncated_file_is_rejected() {
        let dir = tempdir().unwrap();
        let v = random_volume(4, 3);
        let p = dir.path().join("trunc.nii");
        write_volume(&p, &v).unwrap();
        let bytes = fs::read(&p).unwrap();
        fs::write(&p, &bytes[..bytes.len() - 1]).unwrap();
        assert!(read_volume(&p).is_err());
    }

    #[test]
    fn sform_affine_is_preserved() {
        let dir = tempdir().unwrap();
        let mut v = random_volume(6, 3);
        let rows = [
            [0.0, -1.0, 0.0, 12.5],
            [1.0, 0.0, 0.0, -3.0],
            [0.0, 0.0, 2.0, 7.0],
        ];
        v.affine = Some(rows);
        let p = dir.path().join("aff.nii");
        write_volume(&p, &v).unwrap();
        let r = read_volume(&p).unwrap();
        assert_eq!(r.affine, Some(rows));
        assert!(r.is_oblique());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn roundtrip_preserves_labels_and_grid(
            dx in 1usize..8, dy in 1usize..8, dz in 1usize..8,
            sx in 0.25f64..4.0, sy in 0.25f64..4.0, sz in 0.25f64..4.0,
            seed in any::<u64>(), gz in any::<bool>(),
        ) {
            let grid = Grid::new([dx, dy, dz], [sx, sy, sz]);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let labels = (0..grid.len()).map(|_| rng.random_range(0..5u16)).collect();
            let v = LabelVolume::from_labels(grid, labels);
            let dir = tempdir().unwrap();
            let p = dir.path().join(if gz { "v.nii.gz" } else { "v.nii" });
            write_volume(&p, &v).unwrap();
            let r = read_volume(&p).unwrap();
            prop_assert_eq!(&r.labels, &v.labels);
            prop_assert_eq!(r.grid.dims, v.grid.dims);
            for i in 0..3 {
                let (a, b) = (r.grid.spacing[i], v.grid.spacing[i]);
                prop_assert!((a - b).abs() <= 1e-6 * a.max(b));
            }
        }
    }
}
