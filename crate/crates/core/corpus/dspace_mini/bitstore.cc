% BitstreamStorageManager should not be used directly; use Bitstream.
hideScopeButFrom('org.dspace.storage.bitstore.BitstreamStorageManager',
                 ['org.dspace.content.Bitstream']).
