% The image manager must not reach into ImageDoc.
hideScope('ImageDoc').
