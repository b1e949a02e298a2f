export { MAGIC, VERSION, FormatError, WeightTensor, serializeWeights, parseWeights } from './format';
export { CheckpointError, CheckpointWeight, ManifestWeight, readCheckpoint, hwioToOihw } from './tfjs';
export {
  ExportError, ExportManifest, ManifestLayer, SelectedKernel,
  archSkeleton, compilePattern, exportCheckpoint, layerNameOf, selectKernels, toTensor,
} from './export';
export { ValueDiff, VerifyReport, formatVerifyReport, verifyExport } from './verify';
