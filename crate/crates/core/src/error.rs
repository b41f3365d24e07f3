use crate::dataset::DatasetError;
use crate::fmdt::FmdtError;
use crate::metrics::MetricsError;
use crate::partition::PartitionError;
use crate::pit::PitError;

/// Any error raised by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Pit(#[from] PitError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Fmdt(#[from] FmdtError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}
