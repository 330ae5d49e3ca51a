//! File formats and dataset layout.

pub mod dataset;
pub mod raster;
pub mod seg;

pub use dataset::{import_bsds300, list_images, load_group, load_group_dir, read_segmentation};
pub use raster::{read_label_image, render_rgb, write_color_image, write_label_image, LabelDepth};
pub use seg::{parse_seg, parse_seg_file, write_seg, SegFileHeader};
