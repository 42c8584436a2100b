//! Interaction logs: ingestion, splitting, sequence encoding, and a
//! seedable mastery simulator used as the bundled corpus.

mod loader;
mod sequences;
mod simulate;
mod split;
mod types;
mod vocab;

pub use loader::{load_interactions, write_interactions, ColumnSchema, LoadReport};
pub use sequences::{build_sequences, decode_input_index, encode_sequence, EncodedStep, DEFAULT_MAX_LEN};
pub use simulate::{bundled_corpus, simulate_students, MasteryParams, BUNDLED_NUM_SKILLS, BUNDLED_NUM_STUDENTS, BUNDLED_SEED, BUNDLED_STEPS_PER_STUDENT};
pub use split::{split_by_student, summarize_split, SplitSpec, SplitSummary};
pub use types::{Interaction, StudentSequence};
pub use vocab::Vocab;
